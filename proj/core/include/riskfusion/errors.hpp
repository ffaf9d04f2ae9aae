#pragma once

#include <stdexcept>
#include <string>

namespace riskfusion {

/// Invalid model parameter (probability out of range, non-stochastic matrix, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Bayes update whose normalizer is zero.
class DegenerateUpdateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Posterior requested for an action that has probability zero under the current regime.
class ZeroProbabilityActionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Internal consistency failure, e.g. a simulator drawing an impossible action.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace riskfusion
