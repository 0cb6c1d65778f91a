#pragma once

#include "fcforge/schema.h"
#include "fcforge/serializer.h"

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace fcforge {

struct AuditReport {
    std::size_t total_samples = 0;         // rows seen, including rejected ones
    std::size_t empty_queries = 0;
    std::size_t malformed_rows = 0;
    std::vector<RejectedRow> rejected_rows;
    std::size_t positives = 0;
    std::size_t negatives = 0;
    // Samples with at least one enum_violation under each rule.
    std::size_t enum_violations_legacy = 0;
    std::size_t enum_violations_fixed = 0;
    std::size_t samples_restored_by_fix = 0;
    // Positives failing validation for any reason, per rule.
    std::size_t invalid_legacy = 0;
    std::size_t invalid_fixed = 0;
    std::size_t unknown_tool_samples = 0;
    std::vector<std::set<std::string>> duplicate_tool_groups;
    std::vector<std::string> dead_tools;      // zero samples valid under the legacy rule
    std::vector<std::string> revived_tools;   // dead under legacy, alive under none_is_valid
    std::vector<std::string> silent_negatives;  // negatives whose stored response is absent or blank
    std::size_t oversized_prompts = 0;
    std::size_t token_budget = 0;
};

ordered_json to_json(const AuditReport & report);
std::string render_audit_text(const AuditReport & report);

struct AuditOptions {
    std::size_t token_budget = 2048;
    SerializerConfig serializer;
    TokenCounter counter;  // empty: default counter of `serializer`
    unsigned jobs = 1;
};

// Counts are independent of sample order and of `jobs`.
AuditReport audit(const Corpus & corpus, std::span<const ToolSchema> inventory, const AuditOptions & options);

// Groups tools whose sorted (name, type, required) parameter signatures match or whose
// names agree after lowercasing and dropping non-alphanumerics; transitive closure.
// Only groups of two or more are returned, names sorted, groups ordered by first name.
std::vector<std::set<std::string>> detect_duplicates(std::span<const ToolSchema> inventory);

// tool -> parameter -> variant surface form -> canonical enum value.
struct NormalizationMap {
    std::map<std::string, std::map<std::string, std::map<std::string, std::string>>> entries;

    // Throws error(config) unless every canonical value is in that parameter's enum and
    // no canonical value is itself a variant mapped elsewhere.
    void validate(std::span<const ToolSchema> inventory) const;
};

NormalizationMap normalization_map_from_json(const json & j);
ordered_json to_json(const NormalizationMap & map);

// Replaces string argument values that have a map entry (matched after NFC + trim)
// with the canonical value. Idempotent; samples without a target are returned as is.
Sample normalize_sample(const Sample & sample, const NormalizationMap & map);

struct MergeRule {
    std::string target;
    std::map<std::string, std::string> param_renames;  // alias parameter -> target parameter
};

struct PrunePlan {
    std::set<std::string> remove;
    std::map<std::string, MergeRule> merge;  // alias tool -> rule

    // Throws error(config): remove and merge keys overlap, a target is removed, or a target
    // is absent from the inventory.
    void validate(std::span<const ToolSchema> inventory) const;
};

PrunePlan prune_plan_from_json(const json & j);
ordered_json to_json(const PrunePlan & plan);

struct PruneResult {
    std::vector<Sample> samples;
    std::vector<ToolSchema> inventory;
    std::size_t dropped_samples = 0;
    std::size_t rewritten_samples = 0;
    std::vector<std::string> removed_tools;
    std::vector<std::string> merged_tools;
};

PruneResult apply_prune(std::span<const Sample> samples, std::span<const ToolSchema> inventory, const PrunePlan & plan);

} // namespace fcforge
