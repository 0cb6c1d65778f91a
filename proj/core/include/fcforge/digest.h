#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace fcforge {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

std::uint64_t fnv1a64(std::string_view data);

// splitmix64 finalizer; used to derive independent per-record keys.
std::uint64_t mix64(std::uint64_t x);

} // namespace fcforge
