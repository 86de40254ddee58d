#pragma once

#include <stdexcept>
#include <string>

namespace wtime {

enum class ErrorKind {
    InvalidArgument,   // malformed input or violated precondition
    InvalidWeight,     // w <= 0 or non-finite where a positive weight is required
    GridMismatch,
    DecayMargin,       // test function not numerically dead at the edges
    Unresolved,        // test function not resolved by the grid (spike, jump)
    MarginViolation,   // propagator lookup beyond the grid without support guarantee
    Unaligned,         // shift not a multiple of h and interpolation disabled
    DenseCap,
    Config,
    Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace wtime
