#include "fcforge/call_parser.h"

#include "fcforge/text.h"

#include <charconv>
#include <cmath>
#include <cstdint>

namespace fcforge {

const char * to_string(parse_kind kind) {
    switch (kind) {
        case parse_kind::no_call:       return "NoCall";
        case parse_kind::parsed_call:   return "ParsedCall";
        case parse_kind::parse_failure: return "ParseFailure";
    }
    return "ParseFailure";
}

const char * to_string(parse_mode mode) {
    return mode == parse_mode::strict ? "strict" : "deployment-aware";
}

std::optional<parse_mode> parse_mode_from_string(std::string_view name) {
    if (name == "strict") {
        return parse_mode::strict;
    }
    if (name == "deployment-aware" || name == "deployment_aware") {
        return parse_mode::deployment_aware;
    }
    return std::nullopt;
}

const char * to_string(failure_reason reason) {
    switch (reason) {
        case failure_reason::reasoning_not_permitted: return "reasoning block not permitted";
        case failure_reason::unterminated_reasoning:  return "unterminated reasoning block";
        case failure_reason::stray_control_token:     return "stray control token";
        case failure_reason::text_before_call:        return "text before call";
        case failure_reason::missing_tool_name:       return "missing tool name";
        case failure_reason::malformed_arguments:     return "malformed arguments";
        case failure_reason::duplicate_argument:      return "duplicate argument";
        case failure_reason::unterminated_escape:     return "unterminated escape";
        case failure_reason::missing_call_end:        return "missing call end";
        case failure_reason::multiple_calls:          return "multiple calls";
        case failure_reason::trailing_content:        return "trailing content";
    }
    return "malformed arguments";
}

ordered_json to_json(const ParsedOutput & parsed) {
    ordered_json j;
    j["kind"] = to_string(parsed.kind);
    j["call"] = parsed.call ? to_json(*parsed.call) : ordered_json(nullptr);
    j["reasoning"] = parsed.reasoning ? ordered_json(*parsed.reasoning) : ordered_json(nullptr);
    j["had_think_block"] = parsed.had_think_block;
    if (parsed.failure) {
        j["failure"] = ordered_json{
            {"position", parsed.failure->position},
            {"reason", to_string(parsed.failure->reason)},
            {"message", parsed.failure->message},
        };
    } else {
        j["failure"] = nullptr;
    }
    return j;
}

namespace {

constexpr int max_depth = 256;

bool is_json_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

bool is_space(char c) {
    return is_json_space(c) || c == '\f' || c == '\v';
}

void append_utf8(std::string & out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Recursive-descent reader for the argument grammar. On failure it records the
// first error and every caller unwinds.
class ArgumentReader {
public:
    ArgumentReader(std::string_view text, const ControlTokens & tokens) : text_(text), tokens_(tokens) {}

    std::optional<ParseFailureDetail> failure;
    std::size_t pos = 0;

    std::optional<json> value(int depth) {
        if (depth > max_depth) {
            return fail(failure_reason::malformed_arguments, "nesting too deep");
        }
        skip_ws();
        if (at_end()) {
            return fail(failure_reason::malformed_arguments, "unexpected end of arguments");
        }
        if (at_escape()) {
            auto s = escaped_string();
            if (!s) {
                return std::nullopt;
            }
            return json(std::move(*s));
        }
        switch (text_[pos]) {
            case '{': return object(depth);
            case '[': return array(depth);
            case '"': {
                auto s = quoted_string();
                if (!s) {
                    return std::nullopt;
                }
                return json(std::move(*s));
            }
            case 't': return literal("true", json(true));
            case 'f': return literal("false", json(false));
            case 'n': return literal("null", json(nullptr));
            default:
                if (text_[pos] == '-' || (text_[pos] >= '0' && text_[pos] <= '9')) {
                    return number();
                }
                return fail(failure_reason::malformed_arguments, "unexpected character in arguments");
        }
    }

    // Top-level object straight into Arguments so duplicate keys are detected.
    std::optional<Arguments> top_object() {
        skip_ws();
        if (at_end() || text_[pos] != '{') {
            fail(failure_reason::malformed_arguments, "expected '{'");
            return std::nullopt;
        }
        Arguments args;
        bool ok = members(1, [&](std::string key, json v, std::size_t key_pos) {
            if (!args.emplace(std::move(key), std::move(v)).second) {
                pos = key_pos;
                fail(failure_reason::duplicate_argument, "duplicate key");
                return false;
            }
            return true;
        });
        if (!ok) {
            return std::nullopt;
        }
        return args;
    }

private:
    std::string_view text_;
    const ControlTokens & tokens_;

    bool at_end() const { return pos >= text_.size(); }

    bool at_escape() const { return text_.substr(pos).starts_with(tokens_.escape); }

    void skip_ws() {
        while (!at_end() && is_json_space(text_[pos])) {
            ++pos;
        }
    }

    std::nullopt_t fail(failure_reason reason, const char * message) {
        if (!failure) {
            failure = ParseFailureDetail{pos, reason, message};
        }
        return std::nullopt;
    }

    template <typename OnMember>
    bool members(int depth, OnMember && on_member) {
        ++pos;  // '{'
        skip_ws();
        if (!at_end() && text_[pos] == '}') {
            ++pos;
            return true;
        }
        while (true) {
            skip_ws();
            const std::size_t key_pos = pos;
            std::optional<std::string> key;
            if (at_end()) {
                fail(failure_reason::malformed_arguments, "unterminated object");
                return false;
            }
            if (at_escape()) {
                key = escaped_string();
            } else if (text_[pos] == '"') {
                key = quoted_string();
            } else {
                fail(failure_reason::malformed_arguments, text_[pos] == '}' ? "trailing comma in object"
                                                                             : "expected string key");
                return false;
            }
            if (!key) {
                return false;
            }
            skip_ws();
            if (at_end() || text_[pos] != ':') {
                fail(failure_reason::malformed_arguments, "expected ':' after key");
                return false;
            }
            ++pos;
            auto v = value(depth + 1);
            if (!v) {
                return false;
            }
            if (!on_member(std::move(*key), std::move(*v), key_pos)) {
                return false;
            }
            skip_ws();
            if (at_end()) {
                fail(failure_reason::malformed_arguments, "unterminated object");
                return false;
            }
            if (text_[pos] == ',') {
                ++pos;
                continue;
            }
            if (text_[pos] == '}') {
                ++pos;
                return true;
            }
            fail(failure_reason::malformed_arguments, "expected ',' or '}'");
            return false;
        }
    }

    std::optional<json> object(int depth) {
        json obj = json::object();
        bool ok = members(depth, [&](std::string key, json v, std::size_t key_pos) {
            if (obj.contains(key)) {
                pos = key_pos;
                fail(failure_reason::duplicate_argument, "duplicate key");
                return false;
            }
            obj[std::move(key)] = std::move(v);
            return true;
        });
        if (!ok) {
            return std::nullopt;
        }
        return obj;
    }

    std::optional<json> array(int depth) {
        ++pos;  // '['
        json arr = json::array();
        skip_ws();
        if (!at_end() && text_[pos] == ']') {
            ++pos;
            return arr;
        }
        while (true) {
            skip_ws();
            if (!at_end() && text_[pos] == ']') {
                return fail(failure_reason::malformed_arguments, "trailing comma in array");
            }
            auto v = value(depth + 1);
            if (!v) {
                return std::nullopt;
            }
            arr.push_back(std::move(*v));
            skip_ws();
            if (at_end()) {
                return fail(failure_reason::malformed_arguments, "unterminated array");
            }
            if (text_[pos] == ',') {
                ++pos;
                continue;
            }
            if (text_[pos] == ']') {
                ++pos;
                return arr;
            }
            return fail(failure_reason::malformed_arguments, "expected ',' or ']'");
        }
    }

    std::optional<std::string> escaped_string() {
        const std::size_t open = pos;
        const std::size_t body = pos + tokens_.escape.size();
        const auto close = text_.find(tokens_.escape, body);
        if (close == std::string_view::npos) {
            pos = open;
            fail(failure_reason::unterminated_escape, "unterminated escape region");
            return std::nullopt;
        }
        pos = close + tokens_.escape.size();
        return std::string(text_.substr(body, close - body));
    }

    std::optional<std::uint32_t> hex4() {
        if (pos + 4 > text_.size()) {
            fail(failure_reason::malformed_arguments, "truncated \\u escape");
            return std::nullopt;
        }
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            const char c = text_[pos++];
            v <<= 4;
            if (c >= '0' && c <= '9') {
                v |= static_cast<std::uint32_t>(c - '0');
            } else if (c >= 'a' && c <= 'f') {
                v |= static_cast<std::uint32_t>(c - 'a' + 10);
            } else if (c >= 'A' && c <= 'F') {
                v |= static_cast<std::uint32_t>(c - 'A' + 10);
            } else {
                --pos;
                fail(failure_reason::malformed_arguments, "bad hex digit in \\u escape");
                return std::nullopt;
            }
        }
        return v;
    }

    std::optional<std::string> quoted_string() {
        ++pos;  // opening quote
        std::string out;
        while (true) {
            if (at_end()) {
                fail(failure_reason::malformed_arguments, "unterminated string");
                return std::nullopt;
            }
            const char c = text_[pos];
            if (c == '"') {
                ++pos;
                return out;
            }
            if (static_cast<unsigned char>(c) < 0x20) {
                fail(failure_reason::malformed_arguments, "control character in string");
                return std::nullopt;
            }
            if (c != '\\') {
                out.push_back(c);
                ++pos;
                continue;
            }
            ++pos;
            if (at_end()) {
                fail(failure_reason::malformed_arguments, "unterminated string");
                return std::nullopt;
            }
            const char e = text_[pos++];
            switch (e) {
                case '"':  out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                case '/':  out.push_back('/'); break;
                case 'b':  out.push_back('\b'); break;
                case 'f':  out.push_back('\f'); break;
                case 'n':  out.push_back('\n'); break;
                case 'r':  out.push_back('\r'); break;
                case 't':  out.push_back('\t'); break;
                case 'u': {
                    auto cp = hex4();
                    if (!cp) {
                        return std::nullopt;
                    }
                    if (*cp >= 0xD800 && *cp <= 0xDBFF) {
                        if (!text_.substr(pos).starts_with("\\u")) {
                            fail(failure_reason::malformed_arguments, "unpaired surrogate");
                            return std::nullopt;
                        }
                        pos += 2;
                        auto lo = hex4();
                        if (!lo) {
                            return std::nullopt;
                        }
                        if (*lo < 0xDC00 || *lo > 0xDFFF) {
                            fail(failure_reason::malformed_arguments, "unpaired surrogate");
                            return std::nullopt;
                        }
                        *cp = 0x10000 + ((*cp - 0xD800) << 10) + (*lo - 0xDC00);
                    } else if (*cp >= 0xDC00 && *cp <= 0xDFFF) {
                        fail(failure_reason::malformed_arguments, "unpaired surrogate");
                        return std::nullopt;
                    }
                    append_utf8(out, *cp);
                    break;
                }
                default:
                    --pos;
                    fail(failure_reason::malformed_arguments, "invalid escape sequence");
                    return std::nullopt;
            }
        }
    }

    std::optional<json> literal(std::string_view word, json v) {
        if (!text_.substr(pos).starts_with(word)) {
            return fail(failure_reason::malformed_arguments, "invalid literal");
        }
        pos += word.size();
        return v;
    }

    std::optional<json> number() {
        const std::size_t start = pos;
        auto digits = [&] {
            const std::size_t from = pos;
            while (!at_end() && text_[pos] >= '0' && text_[pos] <= '9') {
                ++pos;
            }
            return pos - from;
        };
        if (text_[pos] == '-') {
            ++pos;
        }
        if (at_end()) {
            return fail(failure_reason::malformed_arguments, "truncated number");
        }
        if (text_[pos] == '0') {
            ++pos;
        } else if (digits() == 0) {
            return fail(failure_reason::malformed_arguments, "invalid number");
        }
        bool integral = true;
        if (!at_end() && text_[pos] == '.') {
            integral = false;
            ++pos;
            if (digits() == 0) {
                return fail(failure_reason::malformed_arguments, "invalid fraction");
            }
        }
        if (!at_end() && (text_[pos] == 'e' || text_[pos] == 'E')) {
            integral = false;
            ++pos;
            if (!at_end() && (text_[pos] == '+' || text_[pos] == '-')) {
                ++pos;
            }
            if (digits() == 0) {
                return fail(failure_reason::malformed_arguments, "invalid exponent");
            }
        }
        const char * first = text_.data() + start;
        const char * last = text_.data() + pos;
        if (integral) {
            std::int64_t i = 0;
            if (auto [p, ec] = std::from_chars(first, last, i); ec == std::errc() && p == last) {
                return json(i);
            }
            std::uint64_t u = 0;
            if (auto [p, ec] = std::from_chars(first, last, u); ec == std::errc() && p == last) {
                return json(u);
            }
        }
        double d = 0;
        auto [p, ec] = std::from_chars(first, last, d);
        if (ec != std::errc() || p != last || !std::isfinite(d)) {
            pos = start;
            return fail(failure_reason::malformed_arguments, "number out of range");
        }
        return json(d);
    }
};

} // namespace

ArgumentParse parse_arguments(std::string_view text, std::size_t start, const ControlTokens & tokens) {
    ArgumentReader reader(text, tokens);
    reader.pos = start;
    ArgumentParse result;
    auto args = reader.top_object();
    if (!args) {
        result.failure = reader.failure.value_or(
            ParseFailureDetail{reader.pos, failure_reason::malformed_arguments, "malformed arguments"});
        return result;
    }
    result.arguments = std::move(args);
    result.end = reader.pos;
    return result;
}

ParsedOutput parse_output(std::string_view text, const ParserTokens & tokens, parse_mode mode) {
    const auto & ct = tokens.control;
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && is_space(text[pos])) {
            ++pos;
        }
    };
    auto at = [&](std::string_view tok) { return text.substr(pos).starts_with(tok); };

    skip_ws();
    std::optional<std::string> reasoning;
    if (at(tokens.think.open)) {
        if (mode == parse_mode::strict) {
            return ParsedOutput::failed(pos, failure_reason::reasoning_not_permitted,
                                        "reasoning block before the call");
        }
        const auto body = pos + tokens.think.open.size();
        const auto close = text.find(tokens.think.close, body);
        if (close == std::string_view::npos) {
            return ParsedOutput::failed(pos, failure_reason::unterminated_reasoning, "think block is never closed");
        }
        reasoning = std::string(trim(text.substr(body, close - body)));
        pos = close + tokens.think.close.size();
        skip_ws();
    }
    auto finish = [&](ParsedOutput out) {
        if (reasoning && out.kind != parse_kind::parse_failure) {
            out.reasoning = std::move(reasoning);
            out.had_think_block = true;
        }
        return out;
    };

    const auto rest = text.substr(pos);
    const auto call_at = rest.find(ct.call_start);
    if (call_at == std::string_view::npos) {
        for (std::string_view stray : {std::string_view(ct.call_end), std::string_view(ct.decl_start),
                                       std::string_view(ct.decl_end), std::string_view(ct.resp_start),
                                       std::string_view(ct.resp_end), std::string_view(ct.escape)}) {
            if (auto where = rest.find(stray); where != std::string_view::npos) {
                return ParsedOutput::failed(pos + where, failure_reason::stray_control_token,
                                            "control token outside a call");
            }
        }
        return finish(ParsedOutput::no_call());
    }
    if (call_at != 0) {
        return ParsedOutput::failed(pos, failure_reason::text_before_call, "text before the call token");
    }
    pos += ct.call_start.size();
    skip_ws();

    const std::size_t name_begin = pos;
    while (pos < text.size() && text[pos] != '{' && !is_space(text[pos])) {
        ++pos;
    }
    const auto name = text.substr(name_begin, pos - name_begin);
    if (name.empty()) {
        return ParsedOutput::failed(name_begin, failure_reason::missing_tool_name, "empty tool name");
    }
    for (auto tok : ct.all()) {
        if (name.find(tok) != std::string_view::npos) {
            return ParsedOutput::failed(name_begin, failure_reason::missing_tool_name,
                                        "tool name contains a control token");
        }
    }
    skip_ws();
    if (pos >= text.size()) {
        return ParsedOutput::failed(pos, failure_reason::malformed_arguments, "call truncated before arguments");
    }
    auto args = parse_arguments(text, pos, ct);
    if (!args.arguments) {
        return ParsedOutput::failed(args.failure->position, args.failure->reason, args.failure->message);
    }
    pos = args.end;
    skip_ws();
    if (!at(ct.call_end)) {
        if (pos < text.size() && at(ct.call_start)) {
            return ParsedOutput::failed(pos, failure_reason::multiple_calls, "second call before call end");
        }
        return ParsedOutput::failed(pos, failure_reason::missing_call_end, "expected call end token");
    }
    pos += ct.call_end.size();
    skip_ws();
    if (at(ct.turn_end)) {
        pos += ct.turn_end.size();
        skip_ws();
    }
    if (pos != text.size()) {
        if (at(ct.call_start)) {
            return ParsedOutput::failed(pos, failure_reason::multiple_calls, "parallel calls are not supported");
        }
        return ParsedOutput::failed(pos, failure_reason::trailing_content, "content after the call");
    }
    return finish(ParsedOutput::parsed(ToolCall{std::string(name), std::move(*args.arguments)}));
}

} // namespace fcforge
