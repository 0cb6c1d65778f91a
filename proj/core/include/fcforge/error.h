#pragma once

#include <stdexcept>
#include <string>

namespace fcforge {

enum class error_kind {
    input,          // malformed or inconsistent input data
    config,         // invalid configuration (plans, maps, tokens, specs)
    sampling,       // tool sampler cannot satisfy its request
    serialization,  // sample cannot be rendered into a chat example
    internal,
};

const char * to_string(error_kind kind);

class error : public std::runtime_error {
public:
    error(error_kind kind, const std::string & message)
        : std::runtime_error(message), kind_(kind) {}

    error_kind kind() const noexcept { return kind_; }

private:
    error_kind kind_;
};

[[noreturn]] inline void throw_input(const std::string & msg) { throw error(error_kind::input, msg); }
[[noreturn]] inline void throw_config(const std::string & msg) { throw error(error_kind::config, msg); }

} // namespace fcforge
