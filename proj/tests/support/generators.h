#pragma once

// Random evaluation records for property tests and the acceptance suite.

#include "oracles.h"

#include <random>
#include <vector>

namespace oracle {

// Flat scalar arguments drawn from a small pool so that partial overlaps are common.
fcforge::Arguments random_arguments(std::mt19937_64 & rng);

// `n` records covering every parse kind, polarity and error class; ids are "r<i>".
std::vector<Record> random_records(std::mt19937_64 & rng, std::size_t n);

// Scores every record with the library and aggregates.
fcforge::MetricsReport evaluate_records(const std::vector<Record> & records);

} // namespace oracle
