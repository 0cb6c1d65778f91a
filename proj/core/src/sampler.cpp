#include "fcforge/sampler.h"

#include "fcforge/digest.h"
#include "fcforge/error.h"

#include <limits>
#include <numeric>
#include <string>

namespace fcforge {

std::uint64_t sample_key(std::uint64_t seed, std::uint64_t epoch, std::string_view sample_id) {
    return mix64(mix64(seed ^ 0x5a17ab1e00000000ULL) ^ mix64(epoch + 0x9e3779b97f4a7c15ULL) ^ fnv1a64(sample_id));
}

std::uint64_t uniform_below(std::mt19937_64 & rng, std::uint64_t bound) {
    // Reject the top sliver so every residue is equally likely.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                (std::numeric_limits<std::uint64_t>::max() % bound);
    std::uint64_t x = 0;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

namespace {

// Partial Fisher-Yates: after the call the first `count` slots hold a uniform
// ordered sample without replacement.
void partial_shuffle(std::vector<std::size_t> & pool, std::size_t count, std::mt19937_64 & rng) {
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_below(rng, pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
}

} // namespace

std::vector<std::size_t> sample_tool_indices(std::span<const ToolSchema> inventory,
                                             std::optional<std::string_view> target, bool requires_function,
                                             std::string_view sample_id, const SamplerConfig & config) {
    if (config.k == 0) {
        throw_config("sampler: k must be at least 1");
    }
    if (inventory.size() < config.k) {
        throw error(error_kind::sampling, "sampler: inventory has " + std::to_string(inventory.size()) +
                                              " tools, fewer than k = " + std::to_string(config.k));
    }
    std::mt19937_64 rng(sample_key(config.seed, config.epoch, sample_id));

    std::vector<std::size_t> chosen;
    chosen.reserve(config.k);
    if (requires_function) {
        if (!target) {
            throw_config("sampler: sample '" + std::string(sample_id) + "' requires a function but has no target");
        }
        std::optional<std::size_t> target_index;
        for (std::size_t i = 0; i < inventory.size(); ++i) {
            if (inventory[i].name == *target) {
                target_index = i;
                break;
            }
        }
        if (!target_index) {
            throw_config("sampler: target tool '" + std::string(*target) + "' of sample '" + std::string(sample_id) +
                         "' is not in the inventory");
        }
        std::vector<std::size_t> distractors;
        distractors.reserve(inventory.size() - 1);
        for (std::size_t i = 0; i < inventory.size(); ++i) {
            if (i != *target_index) {
                distractors.push_back(i);
            }
        }
        partial_shuffle(distractors, config.k - 1, rng);
        chosen.push_back(*target_index);
        chosen.insert(chosen.end(), distractors.begin(), distractors.begin() + static_cast<std::ptrdiff_t>(config.k - 1));
    } else {
        std::vector<std::size_t> pool(inventory.size());
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        partial_shuffle(pool, config.k, rng);
        chosen.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(config.k));
    }
    // Final permutation removes any positional signal (the target would otherwise sit first).
    partial_shuffle(chosen, chosen.size(), rng);
    return chosen;
}

std::vector<ToolSchema> sample_tools(std::span<const ToolSchema> inventory, std::optional<std::string_view> target,
                                     bool requires_function, std::string_view sample_id,
                                     const SamplerConfig & config) {
    std::vector<ToolSchema> out;
    for (auto i : sample_tool_indices(inventory, target, requires_function, sample_id, config)) {
        out.push_back(inventory[i]);
    }
    return out;
}

std::vector<ToolSchema> sample_tools(std::span<const ToolSchema> inventory, const Sample & sample,
                                     const SamplerConfig & config) {
    std::optional<std::string_view> target;
    if (sample.target) {
        target = sample.target->tool_name;
    }
    return sample_tools(inventory, target, sample.requires_function, sample.id, config);
}

} // namespace fcforge
