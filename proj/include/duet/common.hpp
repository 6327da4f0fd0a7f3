#pragma once

#include <stdexcept>
#include <string>

namespace duet {

inline constexpr double pi = 3.14159265358979323846;

// Precondition or contract violation on the caller's side (CLI exit code 2).
// Messages start with a stable kind token, e.g. "no-resonance: ...".
class invalid_argument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An iterative or numerical procedure failed to produce a result
// (CLI exit code 3): no-convergence, tracking-error, pole-error, ...
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace duet
