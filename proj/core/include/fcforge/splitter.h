#pragma once

#include "fcforge/schema.h"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fcforge {

enum class strata_key { dialect, domain, tool };

const char * to_string(strata_key key);
strata_key strata_key_from_string(std::string_view name);

enum class partition { train = 0, val = 1, test = 2 };

struct SplitSpec {
    std::array<double, 3> ratios{0.8, 0.1, 0.1};  // train, val, test
    std::uint64_t seed = 0;
    std::vector<strata_key> keys{strata_key::dialect, strata_key::domain};

    // Throws error(config): each ratio in (0, 1), sum 1 within 1e-9, keys non-empty and distinct.
    void validate() const;
};

struct StratumCounts {
    std::string key;  // stratum label, values joined by '|'
    std::size_t size = 0;
    std::array<std::size_t, 3> counts{};
};

struct SplitResult {
    // Indices into the input, ascending (input order).
    std::array<std::vector<std::size_t>, 3> members;
    std::vector<StratumCounts> strata;  // sorted by key
    std::vector<std::string> warnings;

    const std::vector<std::size_t> & train() const { return members[0]; }
    const std::vector<std::size_t> & val() const { return members[1]; }
    const std::vector<std::size_t> & test() const { return members[2]; }
};

// Largest-remainder apportionment of `total` over `ratios`; ties go to the larger
// remainder, then the earlier slot.
std::array<std::size_t, 3> apportion(std::size_t total, const std::array<double, 3> & ratios);

// Stratified three-way split. Every stratum's count for a partition is floor or ceil of
// ratio x stratum size, and the totals equal apportion(N_eligible). Strata with fewer than
// three samples go wholly to train (with a warning). Membership depends only on sample
// ids, strata values and the seed, never on input order. Throws error(input) on duplicate ids.
SplitResult stratified_split(std::span<const Sample> samples, const SplitSpec & spec);

std::string stratum_label(const Sample & sample, std::span<const strata_key> keys);

ordered_json split_manifest(std::span<const Sample> samples, const SplitSpec & spec, const SplitResult & result);

} // namespace fcforge
