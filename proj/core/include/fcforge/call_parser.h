#pragma once

#include "fcforge/schema.h"
#include "fcforge/serializer.h"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace fcforge {

enum class parse_kind { no_call, parsed_call, parse_failure };

const char * to_string(parse_kind kind);

enum class parse_mode { strict, deployment_aware };

const char * to_string(parse_mode mode);
std::optional<parse_mode> parse_mode_from_string(std::string_view name);

enum class failure_reason {
    reasoning_not_permitted,  // strict mode saw a leading think block
    unterminated_reasoning,
    stray_control_token,      // control token outside any call
    text_before_call,
    missing_tool_name,
    malformed_arguments,
    duplicate_argument,
    unterminated_escape,
    missing_call_end,
    multiple_calls,
    trailing_content,
};

const char * to_string(failure_reason reason);

struct ParseFailureDetail {
    std::size_t position = 0;  // byte offset into the raw completion
    failure_reason reason = failure_reason::malformed_arguments;
    std::string message;
};

struct ParsedOutput {
    parse_kind kind = parse_kind::no_call;
    std::optional<ToolCall> call;            // present iff kind == parsed_call
    std::optional<std::string> reasoning;    // present iff a think block was consumed
    bool had_think_block = false;
    std::optional<ParseFailureDetail> failure;

    static ParsedOutput no_call() { return {}; }
    static ParsedOutput parsed(ToolCall call) {
        ParsedOutput p;
        p.kind = parse_kind::parsed_call;
        p.call = std::move(call);
        return p;
    }
    static ParsedOutput failed(std::size_t position, failure_reason reason, std::string message = {}) {
        ParsedOutput p;
        p.kind = parse_kind::parse_failure;
        p.failure = ParseFailureDetail{position, reason, std::move(message)};
        return p;
    }
};

ordered_json to_json(const ParsedOutput & parsed);

struct ParserTokens {
    ControlTokens control;
    ThinkTokens think;

    static ParserTokens from(const SerializerConfig & config) { return {config.tokens, config.think}; }
};

// Total over arbitrary bytes. Grammar, after optional whitespace:
//   [think.open reasoning think.close]      (deployment_aware only; strict rejects it)
//   ( call_start NAME ARGS call_end [turn_end]  |  text without control tokens )
// ARGS is a strict JSON object whose string values may also be written as
// escape ... escape (taken verbatim). Duplicate keys, trailing commas, and any
// non-whitespace after the call are failures.
ParsedOutput parse_output(std::string_view text, const ParserTokens & tokens, parse_mode mode);

// The argument-object grammar alone, exposed for tests and tools. Returns the
// parsed object or the failure detail with positions relative to `text`.
struct ArgumentParse {
    std::optional<Arguments> arguments;
    std::optional<ParseFailureDetail> failure;
    std::size_t end = 0;  // one past the closing brace on success
};

ArgumentParse parse_arguments(std::string_view text, std::size_t start, const ControlTokens & tokens);

} // namespace fcforge
