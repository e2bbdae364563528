#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wppsc {

/// Argument outside the mathematical domain of an operation (e.g. SCR <= 0).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Parallel combination whose denominator vanishes.
class SingularCombination : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid scenario configuration. `key()` names the offending dotted key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Operation called in a state its contract excludes (e.g. SC model on a disabled SC).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Damped Newton exhausted its iteration budget.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(int iterations, double final_residual)
        : std::runtime_error("equilibrium solver did not converge after " +
                             std::to_string(iterations) + " iterations (residual " +
                             std::to_string(final_residual) + ")"),
          iterations_(iterations), final_residual_(final_residual) {}
    int iterations() const noexcept { return iterations_; }
    double final_residual() const noexcept { return final_residual_; }

private:
    int iterations_;
    double final_residual_;
};

/// Newton stagnated far from zero: no equilibrium exists for this operating point.
class Infeasible : public std::runtime_error {
public:
    explicit Infeasible(double final_residual)
        : std::runtime_error("no equilibrium: residual stagnated at " +
                             std::to_string(final_residual)),
          final_residual_(final_residual) {}
    double final_residual() const noexcept { return final_residual_; }

private:
    double final_residual_;
};

class NonFiniteDerivative : public std::runtime_error {
public:
    NonFiniteDerivative(std::size_t row, std::size_t col)
        : std::runtime_error("non-finite derivative at (" + std::to_string(row) + ", " +
                             std::to_string(col) + ")"),
          row_(row), col_(col) {}
    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

class EigenSolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fault current did not settle inside the measurement window.
class MeasurementInvalid : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wppsc
