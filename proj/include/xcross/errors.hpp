#pragma once

#include <stdexcept>
#include <string>

namespace xcross {

// Argument outside the mathematical domain of an operation (z < 0 for I1, x <= 0 for a pdf, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Request the library deliberately does not serve: an unsupported Bessel or GIG order,
// an infinite horizon for a near-critical exact evaluation, a non-exponential model for
// the exact kernel.
class UnsupportedError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Both variances vanish (D^2 = 0) or a kernel needs a strictly positive variance.
class DegenerateModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical integration did not reach its tolerance. Carries the achieved estimate.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double value, double abs_error)
        : std::runtime_error(what), value_(value), abs_error_(abs_error) {}

    double value() const noexcept { return value_; }
    double abs_error() const noexcept { return abs_error_; }

private:
    double value_;
    double abs_error_;
};

}  // namespace xcross
