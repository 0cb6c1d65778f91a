#pragma once

// Synthetic data used by the test suite, the benchmarks and `fcforge fixture`.
// Everything here is a pure function of its options and seed.

#include "fcforge/audit.h"
#include "fcforge/evaluator.h"
#include "fcforge/schema.h"
#include "fcforge/serializer.h"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace fcforge::fixtures {

// The 27 production tools.
std::vector<ToolSchema> core_inventory();

// core_inventory() plus 7 noisy tools and 2 aliases with signatures identical to
// their canonical tool (36 tools). prune_plan() maps it back onto the core 27.
std::vector<ToolSchema> raw_inventory();

PrunePlan prune_plan();
NormalizationMap normalization_map();

struct CorpusOptions {
    std::size_t rows = 200;
    std::uint64_t seed = 1;
    double negative_share = 0.1;
    // Positives whose target leaves an optional enum parameter explicitly null.
    std::size_t null_enum_rows = 0;
    // Positives that spell an enum value with a surface variant known to normalization_map().
    std::size_t variant_enum_rows = 0;
    // Positives that target an alias tool (merged by prune_plan()).
    std::size_t alias_rows = 0;
    // Positives that target a noisy tool (removed by prune_plan()).
    std::size_t noisy_rows = 0;
    // Rows written with an empty query (rejected on load).
    std::size_t empty_queries = 0;
    // Share of samples carrying a reasoning trace.
    double reasoning_share = 0.0;
    // Negatives get a stored response unless they are among this many "silent" ones.
    std::size_t silent_negatives = 0;
};

// Corpus rows as JSONL text (one object per line). The special rows are spread over
// the file deterministically; the remaining positives are valid under both enum rules.
std::string corpus_jsonl(const CorpusOptions & options);

// Same rows as parsed samples (empty-query rows omitted).
std::vector<Sample> corpus_samples(const CorpusOptions & options);

// A valid positive sample for `tool` with random argument values, including strings
// with braces, quotes, backslashes, the escape glyph, Arabic text and nested values.
Sample random_positive(std::mt19937_64 & rng, const ToolSchema & tool, const std::string & id,
                       const ControlTokens & tokens = {});

// A model output for `sample` that scores as `klass` under deployment-aware parsing
// with the given offered tools. `think` prefixes a reasoning block. Throws
// error(config) for combinations that cannot exist (e.g. MissedCall on a negative).
std::string make_prediction(const Sample & sample, const std::vector<ToolSchema> & offered,
                            std::span<const ToolSchema> inventory, error_class klass, bool think,
                            const SerializerConfig & config = {});

} // namespace fcforge::fixtures
