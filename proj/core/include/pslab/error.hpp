#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pslab {

enum class ErrorKind {
    invalid_argument,
    unsupported_range,
    no_representation,
    resource_limit,
    precondition_violation,
    out_of_domain,
    division_guard,
    io_error,
    format_error,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace pslab
