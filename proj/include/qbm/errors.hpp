#pragma once

#include <stdexcept>
#include <string>

namespace qbm {

// Argument outside the documented domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

// Evaluation exactly on a real-axis pole of the susceptibility.
class PoleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Quadrature budget exhausted or the acceleration table diverged.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, double best_estimate = 0.0)
        : std::runtime_error(what), best_estimate_(best_estimate) {}
    double best_estimate() const noexcept { return best_estimate_; }

private:
    double best_estimate_;
};

// The requested observable is infinite for this bath (infrared divergence).
class DivergentObservable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateGaussian : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientData : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NonPositiveValues : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace qbm
