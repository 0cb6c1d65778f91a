#include "fcforge/text.h"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>
#include <unicode/utypes.h>

#include <stdexcept>

namespace fcforge {

namespace {

bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii(std::string_view text) {
    for (unsigned char c : text) {
        if (c >= 0x80) {
            return false;
        }
    }
    return true;
}

const icu::Normalizer2 & nfc_instance() {
    static const icu::Normalizer2 * instance = [] {
        UErrorCode status = U_ZERO_ERROR;
        const icu::Normalizer2 * n = icu::Normalizer2::getNFCInstance(status);
        if (U_FAILURE(status) || n == nullptr) {
            throw std::runtime_error("ICU NFC normalizer unavailable");
        }
        return n;
    }();
    return *instance;
}

} // namespace

std::string nfc(std::string_view text) {
    // ASCII is already in NFC.
    if (is_ascii(text)) {
        return std::string(text);
    }
    const auto & normalizer = nfc_instance();
    icu::UnicodeString source = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    UErrorCode status = U_ZERO_ERROR;
    if (normalizer.isNormalized(source, status) && U_SUCCESS(status)) {
        std::string out;
        source.toUTF8String(out);
        return out;
    }
    status = U_ZERO_ERROR;
    icu::UnicodeString normalized = normalizer.normalize(source, status);
    if (U_FAILURE(status)) {
        throw std::runtime_error("NFC normalization failed");
    }
    std::string out;
    normalized.toUTF8String(out);
    return out;
}

std::string_view trim(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && is_ascii_space(static_cast<unsigned char>(text[begin]))) {
        ++begin;
    }
    while (end > begin && is_ascii_space(static_cast<unsigned char>(text[end - 1]))) {
        --end;
    }
    return text.substr(begin, end - begin);
}

std::string normalize_text(std::string_view text) {
    return nfc(trim(text));
}

bool is_blank(std::string_view text) {
    return trim(text).empty();
}

std::size_t count_whitespace_units(std::string_view text) {
    std::size_t units = 0;
    bool in_unit = false;
    for (unsigned char c : text) {
        if (is_ascii_space(c)) {
            in_unit = false;
        } else if (!in_unit) {
            in_unit = true;
            ++units;
        }
    }
    return units;
}

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
    if (needle.empty()) {
        return 0;
    }
    std::size_t count = 0;
    for (auto pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + needle.size())) {
        ++count;
    }
    return count;
}

bool is_identifier(std::string_view name) {
    if (name.empty()) {
        return false;
    }
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-' || c == '.';
        if (!ok) {
            return false;
        }
    }
    return true;
}

} // namespace fcforge
