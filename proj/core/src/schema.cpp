#include "fcforge/schema.h"

#include "fcforge/error.h"
#include "fcforge/text.h"

#include <algorithm>
#include <set>

namespace fcforge {

const char * to_string(value_type type) {
    switch (type) {
        case value_type::string:  return "string";
        case value_type::integer: return "integer";
        case value_type::number:  return "number";
        case value_type::boolean: return "boolean";
        case value_type::array:   return "array";
        case value_type::object:  return "object";
    }
    return "string";
}

std::optional<value_type> parse_value_type(std::string_view name) {
    for (auto t : {value_type::string, value_type::integer, value_type::number, value_type::boolean,
                   value_type::array, value_type::object}) {
        if (name == to_string(t)) {
            return t;
        }
    }
    return std::nullopt;
}

bool matches_type(const json & value, value_type type) {
    switch (type) {
        case value_type::string:  return value.is_string();
        case value_type::integer: return value.is_number_integer();
        case value_type::number:  return value.is_number();
        case value_type::boolean: return value.is_boolean();
        case value_type::array:   return value.is_array();
        case value_type::object:  return value.is_object();
    }
    return false;
}

const ParameterSpec * ToolSchema::find_parameter(std::string_view param) const {
    for (const auto & p : parameters) {
        if (p.name == param) {
            return &p;
        }
    }
    return nullptr;
}

const char * to_string(Dialect dialect) {
    switch (dialect) {
        case Dialect::msa:       return "MSA";
        case Dialect::egyptian:  return "Egyptian";
        case Dialect::gulf:      return "Gulf";
        case Dialect::levantine: return "Levantine";
        case Dialect::maghrebi:  return "Maghrebi";
    }
    return "MSA";
}

std::optional<Dialect> parse_dialect(std::string_view name) {
    for (auto d : all_dialects) {
        if (name == to_string(d)) {
            return d;
        }
    }
    return std::nullopt;
}

std::string check_sample(const Sample & sample) {
    if (sample.id.empty()) {
        return "sample id is empty";
    }
    if (is_blank(sample.query)) {
        return "empty query";
    }
    if (sample.domain.empty()) {
        return "domain is empty";
    }
    if (sample.requires_function != sample.target.has_value()) {
        return sample.requires_function ? "requires_function is true but target is missing"
                                        : "requires_function is false but a target is present";
    }
    if (sample.target && sample.target->tool_name.empty()) {
        return "target tool name is empty";
    }
    return {};
}

const char * to_string(violation_kind kind) {
    switch (kind) {
        case violation_kind::missing_required:  return "missing_required";
        case violation_kind::type_mismatch:     return "type_mismatch";
        case violation_kind::enum_violation:    return "enum_violation";
        case violation_kind::unknown_parameter: return "unknown_parameter";
        case violation_kind::unknown_tool:      return "unknown_tool";
    }
    return "unknown_tool";
}

bool ValidationReport::has(violation_kind kind) const {
    return count(kind) > 0;
}

std::size_t ValidationReport::count(violation_kind kind) const {
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [&](const Violation & v) { return v.kind == kind; }));
}

const char * to_string(enum_rule rule) {
    return rule == enum_rule::legacy ? "legacy" : "none_is_valid";
}

const ToolSchema * find_tool(std::span<const ToolSchema> inventory, std::string_view name) {
    for (const auto & tool : inventory) {
        if (tool.name == name) {
            return &tool;
        }
    }
    return nullptr;
}

namespace {

bool enum_contains(const std::vector<std::string> & values, const std::string & candidate) {
    const auto wanted = normalize_text(candidate);
    return std::any_of(values.begin(), values.end(), [&](const std::string & v) { return normalize_text(v) == wanted; });
}

} // namespace

ValidationReport validate_call(const ToolCall & call, std::span<const ToolSchema> inventory, enum_rule rule) {
    if (inventory.empty()) {
        throw_config("validate_call: inventory is empty");
    }
    ValidationReport report;
    const ToolSchema * tool = find_tool(inventory, call.tool_name);
    if (tool == nullptr) {
        report.violations.push_back({call.tool_name, violation_kind::unknown_tool});
        return report;
    }
    for (const auto & param : tool->parameters) {
        auto it = call.arguments.find(param.name);
        const bool absent = it == call.arguments.end();
        const bool is_null = !absent && it->second.is_null();
        if (absent || is_null) {
            if (param.required) {
                report.violations.push_back({param.name, violation_kind::missing_required});
            } else if (is_null && param.has_enum() && rule == enum_rule::legacy) {
                report.violations.push_back({param.name, violation_kind::enum_violation});
            }
            continue;
        }
        const json & value = it->second;
        if (!matches_type(value, param.type)) {
            report.violations.push_back({param.name, violation_kind::type_mismatch});
            continue;
        }
        if (param.has_enum() && !enum_contains(*param.enum_values, value.get<std::string>())) {
            report.violations.push_back({param.name, violation_kind::enum_violation});
        }
    }
    for (const auto & [key, value] : call.arguments) {
        if (tool->find_parameter(key) == nullptr) {
            report.violations.push_back({key, violation_kind::unknown_parameter});
        }
    }
    return report;
}

void check_inventory(std::span<const ToolSchema> inventory) {
    std::set<std::string> names;
    for (const auto & tool : inventory) {
        if (!is_identifier(tool.name)) {
            throw_config("tool name '" + tool.name + "' is not an identifier");
        }
        if (!names.insert(tool.name).second) {
            throw_config("duplicate tool name '" + tool.name + "'");
        }
        std::set<std::string> params;
        for (const auto & p : tool.parameters) {
            if (!is_identifier(p.name)) {
                throw_config("tool '" + tool.name + "': parameter name '" + p.name + "' is not an identifier");
            }
            if (!params.insert(p.name).second) {
                throw_config("tool '" + tool.name + "': duplicate parameter '" + p.name + "'");
            }
            if (p.enum_values) {
                if (p.type != value_type::string) {
                    throw_config("tool '" + tool.name + "': enum on non-string parameter '" + p.name + "'");
                }
                if (p.enum_values->empty()) {
                    throw_config("tool '" + tool.name + "': empty enum on '" + p.name + "'");
                }
                std::set<std::string> seen;
                for (const auto & v : *p.enum_values) {
                    if (!seen.insert(v).second) {
                        throw_config("tool '" + tool.name + "': duplicate enum value '" + v + "' on '" + p.name + "'");
                    }
                }
            }
        }
    }
}

// --- JSON mapping -----------------------------------------------------------

ordered_json to_json(const ParameterSpec & param) {
    ordered_json j;
    j["name"] = param.name;
    j["type"] = to_string(param.type);
    j["description"] = param.description;
    if (param.enum_values) {
        j["enum"] = *param.enum_values;
    }
    j["required"] = param.required;
    return j;
}

ordered_json to_json(const ToolSchema & tool) {
    ordered_json j;
    j["name"] = tool.name;
    j["description"] = tool.description;
    j["parameters"] = ordered_json::array();
    for (const auto & p : tool.parameters) {
        j["parameters"].push_back(to_json(p));
    }
    return j;
}

ordered_json to_json(const ToolCall & call) {
    ordered_json j;
    j["name"] = call.tool_name;
    ordered_json args = ordered_json::object();
    for (const auto & [k, v] : call.arguments) {
        args[k] = v;
    }
    j["arguments"] = std::move(args);
    return j;
}

ordered_json to_json(const Sample & sample) {
    ordered_json j;
    j["id"] = sample.id;
    j["query"] = sample.query;
    j["dialect"] = to_string(sample.dialect);
    j["domain"] = sample.domain;
    j["requires_function"] = sample.requires_function;
    if (sample.target) {
        j["target"] = to_json(*sample.target);
    }
    if (sample.timestamp) {
        j["timestamp"] = *sample.timestamp;
    }
    if (sample.response) {
        j["response"] = *sample.response;
    }
    if (sample.reasoning) {
        j["reasoning"] = *sample.reasoning;
    }
    if (sample.token_count) {
        j["token_count"] = *sample.token_count;
    }
    return j;
}

ordered_json inventory_to_json(std::span<const ToolSchema> inventory) {
    ordered_json arr = ordered_json::array();
    for (const auto & t : inventory) {
        arr.push_back(to_json(t));
    }
    return arr;
}

namespace {

const json & require_field(const json & j, const char * key, const char * where) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw_input(std::string(where) + ": missing field '" + key + "'");
    }
    return *it;
}

std::string require_string(const json & j, const char * key, const char * where) {
    const json & v = require_field(j, key, where);
    if (!v.is_string()) {
        throw_input(std::string(where) + ": field '" + key + "' must be a string");
    }
    return v.get<std::string>();
}

std::string optional_string(const json & j, const char * key, const char * where) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return {};
    }
    if (!it->is_string()) {
        throw_input(std::string(where) + ": field '" + key + "' must be a string");
    }
    return it->get<std::string>();
}

} // namespace

ParameterSpec parameter_from_json(const json & j) {
    if (!j.is_object()) {
        throw_input("parameter must be an object");
    }
    ParameterSpec p;
    p.name = require_string(j, "name", "parameter");
    const auto type_name = require_string(j, "type", "parameter");
    auto type = parse_value_type(type_name);
    if (!type) {
        throw_input("parameter '" + p.name + "': unknown type '" + type_name + "'");
    }
    p.type = *type;
    p.description = optional_string(j, "description", "parameter");
    if (auto it = j.find("enum"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) {
            throw_input("parameter '" + p.name + "': enum must be an array");
        }
        std::vector<std::string> values;
        for (const auto & v : *it) {
            if (!v.is_string()) {
                throw_input("parameter '" + p.name + "': enum values must be strings");
            }
            values.push_back(v.get<std::string>());
        }
        p.enum_values = std::move(values);
    }
    if (auto it = j.find("required"); it != j.end()) {
        if (!it->is_boolean()) {
            throw_input("parameter '" + p.name + "': required must be a boolean");
        }
        p.required = it->get<bool>();
    }
    return p;
}

ToolSchema tool_from_json(const json & j) {
    if (!j.is_object()) {
        throw_input("tool must be an object");
    }
    ToolSchema t;
    t.name = require_string(j, "name", "tool");
    t.description = optional_string(j, "description", "tool");
    if (auto it = j.find("parameters"); it != j.end()) {
        if (!it->is_array()) {
            throw_input("tool '" + t.name + "': parameters must be an array");
        }
        for (const auto & p : *it) {
            t.parameters.push_back(parameter_from_json(p));
        }
    }
    return t;
}

ToolCall call_from_json(const json & j) {
    if (!j.is_object()) {
        throw_input("call must be an object");
    }
    ToolCall call;
    call.tool_name = require_string(j, "name", "call");
    if (auto it = j.find("arguments"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) {
            throw_input("call '" + call.tool_name + "': arguments must be an object");
        }
        for (auto a = it->begin(); a != it->end(); ++a) {
            call.arguments.emplace(a.key(), a.value());
        }
    }
    return call;
}

std::vector<ToolSchema> inventory_from_json(const json & j) {
    if (!j.is_array()) {
        throw_input("inventory must be a JSON array of tools");
    }
    std::vector<ToolSchema> inventory;
    inventory.reserve(j.size());
    for (const auto & t : j) {
        inventory.push_back(tool_from_json(t));
    }
    try {
        check_inventory(inventory);
    } catch (const error & e) {
        throw_input(e.what());
    }
    return inventory;
}

std::vector<ToolSchema> load_inventory(const std::filesystem::path & path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error & e) {
        throw_input(path.string() + ": " + e.what());
    }
    return inventory_from_json(j);
}

Sample sample_from_json(const json & j) {
    if (!j.is_object()) {
        throw_input("sample row must be an object");
    }
    Sample s;
    s.id = require_string(j, "id", "sample");
    s.query = require_string(j, "query", "sample");
    const auto dialect_name = require_string(j, "dialect", "sample");
    auto dialect = parse_dialect(dialect_name);
    if (!dialect) {
        throw_input("sample '" + s.id + "': unknown dialect '" + dialect_name + "'");
    }
    s.dialect = *dialect;
    s.domain = require_string(j, "domain", "sample");
    const json & flag = require_field(j, "requires_function", "sample");
    if (!flag.is_boolean()) {
        throw_input("sample '" + s.id + "': requires_function must be a boolean");
    }
    s.requires_function = flag.get<bool>();
    if (auto it = j.find("target"); it != j.end() && !it->is_null()) {
        s.target = call_from_json(*it);
    }
    if (auto it = j.find("timestamp"); it != j.end() && !it->is_null()) {
        s.timestamp = optional_string(j, "timestamp", "sample");
    }
    if (auto it = j.find("response"); it != j.end() && !it->is_null()) {
        s.response = optional_string(j, "response", "sample");
    }
    if (auto it = j.find("reasoning"); it != j.end() && !it->is_null()) {
        s.reasoning = optional_string(j, "reasoning", "sample");
    }
    if (auto it = j.find("token_count"); it != j.end() && !it->is_null()) {
        if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0)) {
            throw_input("sample '" + s.id + "': token_count must be a non-negative integer");
        }
        s.token_count = it->get<std::size_t>();
    }
    if (auto problem = check_sample(s); !problem.empty()) {
        throw_input(problem == "empty query" ? "empty query in sample '" + s.id + "'"
                                             : "sample '" + s.id + "': " + problem);
    }
    return s;
}

Corpus corpus_from_jsonl(const jsonl_document & doc) {
    Corpus corpus;
    corpus.samples.reserve(doc.rows.size());
    for (const auto & bad : doc.bad_rows) {
        corpus.rejected.push_back({bad.line, {}, row_problem::malformed, bad.reason});
    }
    for (const auto & row : doc.rows) {
        try {
            corpus.samples.push_back(sample_from_json(row.value));
        } catch (const error & e) {
            RejectedRow rejected;
            rejected.line = row.line;
            if (auto it = row.value.find("id"); it != row.value.end() && it->is_string()) {
                rejected.id = it->get<std::string>();
            }
            const std::string msg = e.what();
            rejected.problem = msg.rfind("empty query", 0) == 0 ? row_problem::empty_query : row_problem::malformed;
            rejected.reason = msg;
            corpus.rejected.push_back(std::move(rejected));
        }
    }
    std::sort(corpus.rejected.begin(), corpus.rejected.end(),
              [](const RejectedRow & a, const RejectedRow & b) { return a.line < b.line; });
    return corpus;
}

Corpus load_corpus(const std::filesystem::path & path) {
    return corpus_from_jsonl(read_jsonl(path));
}

} // namespace fcforge
