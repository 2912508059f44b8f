#pragma once

#include <stdexcept>
#include <string>

namespace failsafe {

// Invalid input: bad parameters, malformed vectors, out-of-range arguments.
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// A feature that is declared but not available for the given input
// (e.g. frailty sampling for a non-completely-monotone generator).
class UnsupportedError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Numerical failure: bracket not found, optimizer did not converge.
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Hypotheses of a dominance result verified but the grid disagrees.
class InconsistencyError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ValidationError(what);
}

} // namespace failsafe
