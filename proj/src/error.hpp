#pragma once

#include <stdexcept>
#include <string>

namespace ocean {

enum class ErrorCode {
    invalid_argument = 1,
    io = 2,
    parse = 3,
    not_found = 4,
    internal = 5,
};

// All recoverable failures in the core throw Error; the C boundary maps
// code() onto ocean_status values.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string msg)
        : std::runtime_error(std::move(msg)), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

} // namespace ocean
