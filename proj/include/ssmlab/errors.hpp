#pragma once

#include <stdexcept>
#include <string>

namespace ssmlab {

/// Invalid inputs: hash rates outside the admissible set, malformed tie sets, bad options.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// State-space or search-size limits (miner count caps and the like).
class SizeLimitError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A propagation table that is missing an entry or violates the row constraints.
class PropagationTableError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Numerical failures: singular solves, residuals above tolerance, ambiguous root brackets.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, double residual = 0.0)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// A simulation run that violated an automaton invariant. Always a bug, never user error.
class SimulationBugError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// End-of-run fork settlement did not converge within the step budget.
class SettlementError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ssmlab
