#pragma once

#include <stdexcept>
#include <string>

namespace renyi {

// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Numerical hypothesis of a bound is violated (e.g. the density has too much mass concentration).
struct ConditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iterative method failed to reach its target.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No sharp constant is known for the requested (n, alpha).
struct UnsupportedRegion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input (density spec, CSV file, CLI argument).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace renyi
