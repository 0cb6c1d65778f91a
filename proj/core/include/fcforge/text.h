#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace fcforge {

// Unicode NFC normalization of UTF-8 text. Invalid sequences become U+FFFD.
std::string nfc(std::string_view text);

// Strips leading/trailing ASCII whitespace.
std::string_view trim(std::string_view text);

// nfc(trim(text)); the comparison form used for enum values and argument values.
std::string normalize_text(std::string_view text);

bool is_blank(std::string_view text);

// Number of maximal runs of non-whitespace bytes.
std::size_t count_whitespace_units(std::string_view text);

// Non-overlapping occurrences of `needle` in `text`.
std::size_t count_occurrences(std::string_view text, std::string_view needle);

// Identifier rule shared by tool and parameter names: [A-Za-z0-9_.-]+
bool is_identifier(std::string_view name);

} // namespace fcforge
