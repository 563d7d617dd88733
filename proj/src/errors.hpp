#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace memsfold {

// Parameter or argument outside the admissible domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Raised by the integrator when the step size underflows or the step budget
// runs out. Carries the last accepted state.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double t, std::vector<double> state)
        : std::runtime_error(what), t_(t), state_(std::move(state)) {}

    double t() const noexcept { return t_; }
    const std::vector<double>& state() const noexcept { return state_; }

private:
    double t_;
    std::vector<double> state_;
};

// Newton/bracketing failures in shooting and continuation.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace memsfold
