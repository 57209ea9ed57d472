#include "pslab/error.hpp"

namespace pslab {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid-argument";
        case ErrorKind::unsupported_range: return "unsupported-range";
        case ErrorKind::no_representation: return "no-representation";
        case ErrorKind::resource_limit: return "resource-limit";
        case ErrorKind::precondition_violation: return "precondition-violation";
        case ErrorKind::out_of_domain: return "out-of-domain";
        case ErrorKind::division_guard: return "division-guard";
        case ErrorKind::io_error: return "io-error";
        case ErrorKind::format_error: return "format-error";
    }
    return "unknown";
}

}  // namespace pslab
