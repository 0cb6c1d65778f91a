#pragma once

#include "fcforge/schema.h"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace fcforge {

struct SamplerConfig {
    std::size_t k = 5;
    std::uint64_t seed = 0;
    std::uint64_t epoch = 0;  // mixed into the per-sample key for per-epoch distractor resampling
};

// Per-sample generator state derived only from (seed, epoch, sample_id).
std::uint64_t sample_key(std::uint64_t seed, std::uint64_t epoch, std::string_view sample_id);

// Uniform integer in [0, bound) by rejection; identical across standard libraries.
std::uint64_t uniform_below(std::mt19937_64 & rng, std::uint64_t bound);

// Indices into `inventory`, exactly k distinct, in a uniformly random order. For
// positives the target is always included with k-1 distractors drawn without
// replacement from the rest; for negatives k tools are drawn uniformly.
// Throws error(sampling) when |inventory| < k and error(config) when a positive's
// target is missing or not in the inventory.
std::vector<std::size_t> sample_tool_indices(std::span<const ToolSchema> inventory,
                                             std::optional<std::string_view> target, bool requires_function,
                                             std::string_view sample_id, const SamplerConfig & config);

std::vector<ToolSchema> sample_tools(std::span<const ToolSchema> inventory, std::optional<std::string_view> target,
                                     bool requires_function, std::string_view sample_id,
                                     const SamplerConfig & config);

// Convenience overload pulling target and polarity from the sample.
std::vector<ToolSchema> sample_tools(std::span<const ToolSchema> inventory, const Sample & sample,
                                     const SamplerConfig & config);

} // namespace fcforge
