#pragma once

#include "fcforge/jsonl.h"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fcforge {

enum class value_type { string, integer, number, boolean, array, object };

const char * to_string(value_type type);
std::optional<value_type> parse_value_type(std::string_view name);

// True when `value` may be assigned to a parameter of `type`. Integers are
// accepted where number is declared; nothing else is coerced.
bool matches_type(const json & value, value_type type);

struct ParameterSpec {
    std::string name;
    value_type type = value_type::string;
    std::string description;
    std::optional<std::vector<std::string>> enum_values;
    bool required = false;

    bool has_enum() const { return enum_values.has_value(); }
};

struct ToolSchema {
    std::string name;
    std::string description;
    std::vector<ParameterSpec> parameters;

    const ParameterSpec * find_parameter(std::string_view param) const;
};

using Arguments = std::map<std::string, json>;

struct ToolCall {
    std::string tool_name;
    Arguments arguments;

    bool operator==(const ToolCall &) const = default;
};

enum class Dialect { msa, egyptian, gulf, levantine, maghrebi };

inline constexpr Dialect all_dialects[] = {
    Dialect::msa, Dialect::egyptian, Dialect::gulf, Dialect::levantine, Dialect::maghrebi,
};

const char * to_string(Dialect dialect);
std::optional<Dialect> parse_dialect(std::string_view name);

struct Sample {
    std::string id;
    std::string query;
    Dialect dialect = Dialect::msa;
    std::string domain;
    bool requires_function = false;
    std::optional<ToolCall> target;
    std::optional<std::string> timestamp;  // ISO-8601
    std::optional<std::string> response;   // stored assistant text, if the corpus kept one
    std::optional<std::string> reasoning;  // trace for the think-augmented variant
    std::optional<std::size_t> token_count;  // external count overriding the built-in counter

    bool operator==(const Sample &) const = default;
};

// Empty string when the sample satisfies its invariants, otherwise the first problem found.
std::string check_sample(const Sample & sample);

enum class violation_kind { missing_required, type_mismatch, enum_violation, unknown_parameter, unknown_tool };

const char * to_string(violation_kind kind);

struct Violation {
    std::string parameter;  // tool name for unknown_tool
    violation_kind kind;

    bool operator==(const Violation &) const = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool valid() const { return violations.empty(); }
    bool has(violation_kind kind) const;
    std::size_t count(violation_kind kind) const;
};

// legacy: valid = v in Enum (an explicit null on an enum parameter is a violation).
// none_is_valid: valid = v is null or v in Enum, for non-required parameters.
enum class enum_rule { legacy, none_is_valid };

const char * to_string(enum_rule rule);

const ToolSchema * find_tool(std::span<const ToolSchema> inventory, std::string_view name);

// Checks a call against the inventory. Required parameters must be present and
// non-null under both rules. An unknown tool yields exactly one unknown_tool
// violation. Enum comparison is exact after NFC + trim.
ValidationReport validate_call(const ToolCall & call, std::span<const ToolSchema> inventory, enum_rule rule);

// Throws error(config) when a tool or parameter breaks its invariants or tool names repeat.
void check_inventory(std::span<const ToolSchema> inventory);

// --- JSON mapping -----------------------------------------------------------
//
// Inventory file: [{name, description, parameters: [{name, type, description, enum?, required}]}]
// Sample row: {id, query, dialect, domain, requires_function, target?: {name, arguments},
//              timestamp?, response?, reasoning?, token_count?}

ordered_json to_json(const ParameterSpec & param);
ordered_json to_json(const ToolSchema & tool);
ordered_json to_json(const ToolCall & call);
ordered_json to_json(const Sample & sample);
ordered_json inventory_to_json(std::span<const ToolSchema> inventory);

ParameterSpec parameter_from_json(const json & j);
ToolSchema tool_from_json(const json & j);
ToolCall call_from_json(const json & j);
std::vector<ToolSchema> inventory_from_json(const json & j);
std::vector<ToolSchema> load_inventory(const std::filesystem::path & path);

enum class row_problem { malformed, empty_query };

struct RejectedRow {
    std::size_t line = 0;
    std::string id;  // empty when the row had no readable id
    row_problem problem = row_problem::malformed;
    std::string reason;
};

// Parses one corpus row. Throws error(input) for malformed rows; an empty query
// is reported with the message prefix "empty query".
Sample sample_from_json(const json & j);

struct Corpus {
    std::vector<Sample> samples;
    std::vector<RejectedRow> rejected;
};

// Rows that cannot become a Sample are collected in `rejected` instead of failing the load.
Corpus corpus_from_jsonl(const jsonl_document & doc);
Corpus load_corpus(const std::filesystem::path & path);

} // namespace fcforge
