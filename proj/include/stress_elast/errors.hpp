#pragma once

#include <stdexcept>
#include <string>

namespace stress_elast {

// Bad input that a caller could have checked up front.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Invalid or inconsistent run configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Factorization, eigensolve or residual failure.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularMatrixError : public NumericalError {
public:
    SingularMatrixError(const std::string& what, long kernel_estimate)
        : NumericalError(what), kernel_estimate_(kernel_estimate) {}
    long kernel_estimate() const noexcept { return kernel_estimate_; }

private:
    long kernel_estimate_;
};

} // namespace stress_elast
