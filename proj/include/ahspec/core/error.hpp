#pragma once

#include <stdexcept>
#include <string>

namespace ahspec {

/// Malformed or out-of-contract input (CLI exit code 1).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not certify its own result (CLI exit code 2).
/// Examples: non-monotone truncation sequence, extrapolation spread above
/// tolerance, a solver producing a non-positive growth eigenfunction.
class NumericalDiagnostic : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ahspec
