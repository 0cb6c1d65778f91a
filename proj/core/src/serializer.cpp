#include "fcforge/serializer.h"

#include "fcforge/error.h"
#include "fcforge/text.h"

#include <algorithm>

namespace fcforge {

std::vector<std::string_view> ControlTokens::all() const {
    return {decl_start, decl_end, call_start, call_end, resp_start, resp_end, escape, turn_start, turn_end};
}

namespace {

[[noreturn]] void throw_serialization(const std::string & msg) {
    throw error(error_kind::serialization, msg);
}

std::vector<std::string_view> all_markers(const SerializerConfig & config) {
    auto markers = config.tokens.all();
    markers.push_back(config.think.open);
    markers.push_back(config.think.close);
    return markers;
}

// First marker found in `text`, or empty.
std::string_view find_marker(std::string_view text, const SerializerConfig & config) {
    for (auto m : all_markers(config)) {
        if (text.find(m) != std::string_view::npos) {
            return m;
        }
    }
    return {};
}

} // namespace

void SerializerConfig::validate() const {
    const auto markers = all_markers(*this);
    for (std::size_t i = 0; i < markers.size(); ++i) {
        if (markers[i].empty()) {
            throw_config("serializer config: control tokens must be non-empty");
        }
        for (std::size_t j = 0; j < markers.size(); ++j) {
            if (i == j) {
                continue;
            }
            if (markers[i] == markers[j]) {
                throw_config("serializer config: control token '" + std::string(markers[i]) + "' is repeated");
            }
            if (markers[j].find(markers[i]) != std::string_view::npos) {
                throw_config("serializer config: control token '" + std::string(markers[i]) + "' occurs inside '" +
                             std::string(markers[j]) + "'");
            }
        }
    }
    for (const auto * field : {&system_instruction, &timestamp_label, &no_call_text, &developer_role, &user_role,
                               &model_role, &timestamp.fixed_value}) {
        if (auto m = find_marker(*field, *this); !m.empty()) {
            throw_config("serializer config: text field contains control token '" + std::string(m) + "'");
        }
    }
    if (is_blank(no_call_text)) {
        throw_config("serializer config: no_call_text must be non-empty");
    }
    if (timestamp.mode == timestamp_mode::fixed && is_blank(timestamp.fixed_value)) {
        throw_config("serializer config: fixed timestamp policy needs a value");
    }
}

ordered_json to_json(const SerializerConfig & config) {
    ordered_json j;
    j["system_instruction"] = config.system_instruction;
    j["timestamp_label"] = config.timestamp_label;
    switch (config.timestamp.mode) {
        case timestamp_mode::from_sample: j["timestamp_policy"] = "from_sample"; break;
        case timestamp_mode::omit:        j["timestamp_policy"] = "omit"; break;
        case timestamp_mode::fixed:
            j["timestamp_policy"] = ordered_json{{"fixed", config.timestamp.fixed_value}};
            break;
    }
    const auto & t = config.tokens;
    j["control_tokens"] = ordered_json{
        {"decl_start", t.decl_start}, {"decl_end", t.decl_end},     {"call_start", t.call_start},
        {"call_end", t.call_end},     {"resp_start", t.resp_start}, {"resp_end", t.resp_end},
        {"escape", t.escape},         {"turn_start", t.turn_start}, {"turn_end", t.turn_end},
    };
    j["think_tokens"] = ordered_json{{"open", config.think.open}, {"close", config.think.close}};
    j["no_call_text"] = config.no_call_text;
    j["roles"] = ordered_json{
        {"developer", config.developer_role}, {"user", config.user_role}, {"model", config.model_role}};
    return j;
}

SerializerConfig serializer_config_from_json(const json & j) {
    if (!j.is_object()) {
        throw_config("serializer config must be a JSON object");
    }
    SerializerConfig c;
    auto read = [&](const json & obj, const char * key, std::string & out) {
        if (auto it = obj.find(key); it != obj.end()) {
            if (!it->is_string()) {
                throw_config(std::string("serializer config: '") + key + "' must be a string");
            }
            out = it->get<std::string>();
        }
    };
    read(j, "system_instruction", c.system_instruction);
    read(j, "timestamp_label", c.timestamp_label);
    read(j, "no_call_text", c.no_call_text);
    if (auto it = j.find("timestamp_policy"); it != j.end()) {
        if (it->is_string() && *it == "from_sample") {
            c.timestamp.mode = timestamp_mode::from_sample;
        } else if (it->is_string() && *it == "omit") {
            c.timestamp.mode = timestamp_mode::omit;
        } else if (it->is_object() && it->contains("fixed") && (*it)["fixed"].is_string()) {
            c.timestamp.mode = timestamp_mode::fixed;
            c.timestamp.fixed_value = (*it)["fixed"].get<std::string>();
        } else {
            throw_config("serializer config: timestamp_policy must be \"from_sample\", \"omit\" or {\"fixed\": ...}");
        }
    }
    if (auto it = j.find("control_tokens"); it != j.end()) {
        auto & t = c.tokens;
        read(*it, "decl_start", t.decl_start);
        read(*it, "decl_end", t.decl_end);
        read(*it, "call_start", t.call_start);
        read(*it, "call_end", t.call_end);
        read(*it, "resp_start", t.resp_start);
        read(*it, "resp_end", t.resp_end);
        read(*it, "escape", t.escape);
        read(*it, "turn_start", t.turn_start);
        read(*it, "turn_end", t.turn_end);
    }
    if (auto it = j.find("think_tokens"); it != j.end()) {
        read(*it, "open", c.think.open);
        read(*it, "close", c.think.close);
    }
    if (auto it = j.find("roles"); it != j.end()) {
        read(*it, "developer", c.developer_role);
        read(*it, "user", c.user_role);
        read(*it, "model", c.model_role);
    }
    c.validate();
    return c;
}

ordered_json to_json(const SerializedExample & example) {
    ordered_json j;
    j["id"] = example.sample_id;
    j["text"] = example.text;
    j["prompt_end"] = example.prompt_end;
    j["token_count"] = example.token_count ? ordered_json(*example.token_count) : ordered_json(nullptr);
    return j;
}

SerializedExample serialized_from_json(const json & j) {
    SerializedExample e;
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("text") || !j["text"].is_string() ||
        !j.contains("prompt_end") || !j["prompt_end"].is_number_unsigned()) {
        throw_input("serialized example needs string id, string text and unsigned prompt_end");
    }
    e.sample_id = j["id"].get<std::string>();
    e.text = j["text"].get<std::string>();
    e.prompt_end = j["prompt_end"].get<std::size_t>();
    if (e.prompt_end == 0 || e.prompt_end > e.text.size()) {
        throw_input("serialized example '" + e.sample_id + "': prompt_end out of range");
    }
    if (auto it = j.find("token_count"); it != j.end() && !it->is_null()) {
        e.token_count = it->get<std::size_t>();
    }
    return e;
}

TokenCounter default_token_counter(const SerializerConfig & config) {
    std::vector<std::string> markers;
    for (auto m : all_markers(config)) {
        markers.emplace_back(m);
    }
    return [markers = std::move(markers)](std::string_view text) {
        std::size_t n = count_whitespace_units(text);
        for (const auto & m : markers) {
            n += count_occurrences(text, m);
        }
        return n;
    };
}

std::size_t count_tokens(std::string_view text, const TokenCounter & counter) {
    return counter(text);
}

std::string render_value(const json & value, const ControlTokens & tokens) {
    switch (value.type()) {
        case json::value_t::string: {
            const auto & s = value.get_ref<const std::string &>();
            if (s.find(tokens.escape) == std::string::npos) {
                std::string out;
                out.reserve(s.size() + 2 * tokens.escape.size());
                out += tokens.escape;
                out += s;
                out += tokens.escape;
                return out;
            }
            return value.dump(-1, ' ', false, json::error_handler_t::replace);
        }
        case json::value_t::array: {
            std::string out = "[";
            bool first = true;
            for (const auto & v : value) {
                if (!first) {
                    out += ',';
                }
                first = false;
                out += render_value(v, tokens);
            }
            out += ']';
            return out;
        }
        case json::value_t::object: {
            std::string out = "{";
            bool first = true;
            for (auto it = value.begin(); it != value.end(); ++it) {
                if (!first) {
                    out += ',';
                }
                first = false;
                out += json(it.key()).dump(-1, ' ', false, json::error_handler_t::replace);
                out += ':';
                out += render_value(it.value(), tokens);
            }
            out += '}';
            return out;
        }
        default:
            return value.dump(-1, ' ', false, json::error_handler_t::replace);
    }
}

std::string render_arguments(const Arguments & args, const ToolSchema * schema, const ControlTokens & tokens) {
    std::string out = "{";
    bool first = true;
    auto emit = [&](const std::string & key, const json & value) {
        if (!first) {
            out += ',';
        }
        first = false;
        out += json(key).dump(-1, ' ', false, json::error_handler_t::replace);
        out += ':';
        out += render_value(value, tokens);
    };
    if (schema != nullptr) {
        for (const auto & p : schema->parameters) {
            if (auto it = args.find(p.name); it != args.end()) {
                emit(it->first, it->second);
            }
        }
    }
    for (const auto & [key, value] : args) {
        if (schema == nullptr || schema->find_parameter(key) == nullptr) {
            emit(key, value);
        }
    }
    out += '}';
    return out;
}

std::string render_declaration(const ToolSchema & tool, const ControlTokens & tokens) {
    // Built as an ordered structure so key order follows the declaration.
    std::string props = "{";
    bool first = true;
    json required = json::array();
    for (const auto & p : tool.parameters) {
        if (!first) {
            props += ',';
        }
        first = false;
        props += json(p.name).dump();
        props += ":{\"type\":";
        props += render_value(json(to_string(p.type)), tokens);
        props += ",\"description\":";
        props += render_value(json(p.description), tokens);
        if (p.enum_values) {
            props += ",\"enum\":";
            props += render_value(json(*p.enum_values), tokens);
        }
        props += '}';
        if (p.required) {
            required.push_back(p.name);
        }
    }
    props += '}';
    std::string out = tool.name;
    out += "{\"description\":";
    out += render_value(json(tool.description), tokens);
    out += ",\"parameters\":{\"properties\":";
    out += props;
    out += ",\"required\":";
    out += render_value(required, tokens);
    out += "}}";
    return out;
}

std::string render_prompt(const Sample & sample, std::span<const ToolSchema> tools, const SerializerConfig & config) {
    if (tools.empty()) {
        throw_serialization("sample '" + sample.id + "': no tools to declare");
    }
    if (auto m = find_marker(sample.query, config); !m.empty()) {
        throw_serialization("sample '" + sample.id + "': query contains control token '" + std::string(m) + "'");
    }
    const auto & t = config.tokens;
    std::optional<std::string> stamp;
    switch (config.timestamp.mode) {
        case timestamp_mode::from_sample: stamp = sample.timestamp; break;
        case timestamp_mode::fixed:       stamp = config.timestamp.fixed_value; break;
        case timestamp_mode::omit:        break;
    }
    if (stamp) {
        if (auto m = find_marker(*stamp, config); !m.empty()) {
            throw_serialization("sample '" + sample.id + "': timestamp contains control token");
        }
    }

    std::string out;
    out += t.turn_start;
    out += config.developer_role;
    out += '\n';
    out += config.system_instruction;
    out += '\n';
    if (stamp) {
        out += config.timestamp_label;
        out += ' ';
        out += *stamp;
        out += '\n';
    }
    for (const auto & tool : tools) {
        out += t.decl_start;
        out += render_declaration(tool, t);
        out += t.decl_end;
        out += '\n';
    }
    out += t.turn_end;
    out += '\n';
    out += t.turn_start;
    out += config.user_role;
    out += '\n';
    out += sample.query;
    out += t.turn_end;
    out += '\n';
    out += t.turn_start;
    out += config.model_role;
    out += '\n';
    return out;
}

std::string render_completion(const Sample & sample, const ToolSchema * target_schema, const SerializerConfig & config) {
    const auto & t = config.tokens;
    std::string out;
    if (sample.target) {
        out += t.call_start;
        out += sample.target->tool_name;
        out += render_arguments(sample.target->arguments, target_schema, t);
        out += t.call_end;
    } else {
        out += config.no_call_text;
    }
    out += t.turn_end;
    return out;
}

namespace {

const ToolSchema * resolve_target(const Sample & sample, std::span<const ToolSchema> tools) {
    if (auto problem = check_sample(sample); !problem.empty()) {
        throw_serialization("sample '" + sample.id + "': " + problem);
    }
    if (!sample.target) {
        return nullptr;
    }
    const ToolSchema * schema = find_tool(tools, sample.target->tool_name);
    if (schema == nullptr) {
        throw_serialization("sample '" + sample.id + "': target tool '" + sample.target->tool_name +
                            "' is not among the declared tools");
    }
    return schema;
}

SerializedExample finish(const Sample & sample, std::string prompt, std::string completion,
                         const SerializerConfig & config, const TokenCounter & counter) {
    SerializedExample ex;
    ex.sample_id = sample.id;
    ex.prompt_end = prompt.size();
    ex.text = std::move(prompt);
    ex.text += completion;
    if (sample.token_count) {
        ex.token_count = sample.token_count;
    } else if (counter) {
        ex.token_count = counter(ex.text);
    } else {
        ex.token_count = default_token_counter(config)(ex.text);
    }
    return ex;
}

} // namespace

SerializedExample serialize(const Sample & sample, std::span<const ToolSchema> tools, const SerializerConfig & config,
                            const TokenCounter & counter) {
    const ToolSchema * schema = resolve_target(sample, tools);
    auto prompt = render_prompt(sample, tools, config);
    auto completion = render_completion(sample, schema, config);
    return finish(sample, std::move(prompt), std::move(completion), config, counter);
}

SerializedExample serialize_think(const Sample & sample, std::string_view reasoning, std::span<const ToolSchema> tools,
                                  const SerializerConfig & config, const TokenCounter & counter) {
    if (is_blank(reasoning)) {
        throw_serialization("sample '" + sample.id + "': reasoning trace is empty");
    }
    if (auto m = find_marker(reasoning, config); !m.empty()) {
        throw_serialization("sample '" + sample.id + "': reasoning contains control token '" + std::string(m) + "'");
    }
    const ToolSchema * schema = resolve_target(sample, tools);
    auto prompt = render_prompt(sample, tools, config);
    std::string completion = config.think.open;
    completion += reasoning;
    completion += config.think.close;
    completion += render_completion(sample, schema, config);
    return finish(sample, std::move(prompt), std::move(completion), config, counter);
}

ContextFit check_context_fit(const SerializedExample & example, std::size_t budget) {
    if (!example.token_count) {
        throw_input("check_context_fit: example '" + example.sample_id + "' has no token count");
    }
    const auto n = *example.token_count;
    return {n <= budget, n > budget ? n - budget : 0};
}

} // namespace fcforge
