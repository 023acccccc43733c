#pragma once

#include <stdexcept>
#include <string>

namespace spinmag {

// Bad or unknown configuration input (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A formula was evaluated outside its domain of validity (resonant
// denominator, negative radicand, at-or-beyond criticality). CLI exit code 4.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iteration or integration failed to meet its tolerance (CLI exit code 4).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A scenario was aborted because a mandatory regime condition failed
// (CLI exit code 3).
struct RegimeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace spinmag
