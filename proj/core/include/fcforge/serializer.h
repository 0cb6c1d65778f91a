#pragma once

#include "fcforge/schema.h"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fcforge {

// Literal glyphs of the chat format. Defaults follow the FunctionGemma token set.
struct ControlTokens {
    std::string decl_start = "<start_function_declaration>";
    std::string decl_end = "<end_function_declaration>";
    std::string call_start = "<start_function_call>";
    std::string call_end = "<end_function_call>";
    std::string resp_start = "<start_function_response>";
    std::string resp_end = "<end_function_response>";
    std::string escape = "<escape>";
    std::string turn_start = "<start_of_turn>";
    std::string turn_end = "<end_of_turn>";

    // Every glyph, in a fixed order.
    std::vector<std::string_view> all() const;
};

struct ThinkTokens {
    std::string open = "<think>";
    std::string close = "</think>";
};

enum class timestamp_mode { from_sample, fixed, omit };

struct TimestampPolicy {
    timestamp_mode mode = timestamp_mode::from_sample;
    std::string fixed_value;  // used when mode == fixed
};

struct SerializerConfig {
    std::string system_instruction =
        "You are a model that can do function calling with the following functions. "
        "Answer in the user's language and call a function only when the request needs one.";
    std::string timestamp_label = "Current date and time:";
    TimestampPolicy timestamp;
    ControlTokens tokens;
    ThinkTokens think;
    // Completion for samples that need no call.
    std::string no_call_text = "لا يتطلب هذا الطلب استدعاء أي أداة.";
    std::string developer_role = "developer";
    std::string user_role = "user";
    std::string model_role = "model";

    // Throws error(config): tokens empty, repeated, or one a substring of another.
    void validate() const;
};

ordered_json to_json(const SerializerConfig & config);
SerializerConfig serializer_config_from_json(const json & j);

// Offsets are byte offsets into `text`; m_t = 0 for bytes before prompt_end, 1 from it on.
struct SerializedExample {
    std::string sample_id;
    std::string text;
    std::size_t prompt_end = 0;
    std::optional<std::size_t> token_count;

    std::string_view prompt() const { return std::string_view(text).substr(0, prompt_end); }
    std::string_view completion() const { return std::string_view(text).substr(prompt_end); }
};

ordered_json to_json(const SerializedExample & example);
SerializedExample serialized_from_json(const json & j);

using TokenCounter = std::function<std::size_t(std::string_view)>;

// Whitespace-delimited units plus occurrences of every control and think token.
TokenCounter default_token_counter(const SerializerConfig & config);

std::size_t count_tokens(std::string_view text, const TokenCounter & counter);

// Argument JSON in the call format: keys in the tool's declaration order (unknown
// keys after, sorted), no insignificant whitespace, string values wrapped in the
// escape token unless the value itself contains it.
std::string render_arguments(const Arguments & args, const ToolSchema * schema, const ControlTokens & tokens);

// A single JSON value in the call format (used for nested values and declarations).
std::string render_value(const json & value, const ControlTokens & tokens);

std::string render_declaration(const ToolSchema & tool, const ControlTokens & tokens);

// The prompt part only: developer turn with timestamp, declarations, user turn, and the
// model-turn header. Throws error(serialization) if the query holds a control token.
std::string render_prompt(const Sample & sample, std::span<const ToolSchema> tools, const SerializerConfig & config);

// Completion for the plain variant: the call (or the no-call text) followed by turn_end.
std::string render_completion(const Sample & sample, const ToolSchema * target_schema, const SerializerConfig & config);

// Throws error(serialization) when the gold tool is not among `tools`.
SerializedExample serialize(const Sample & sample, std::span<const ToolSchema> tools, const SerializerConfig & config,
                            const TokenCounter & counter = {});

// Reasoning-augmented variant: completion is think.open + reasoning + think.close + call.
// `reasoning` must be non-blank and free of control/think tokens.
SerializedExample serialize_think(const Sample & sample, std::string_view reasoning, std::span<const ToolSchema> tools,
                                  const SerializerConfig & config, const TokenCounter & counter = {});

struct ContextFit {
    bool fits = true;
    std::size_t overflow_by = 0;
};

// Requires example.token_count.
ContextFit check_context_fit(const SerializedExample & example, std::size_t budget);

} // namespace fcforge
