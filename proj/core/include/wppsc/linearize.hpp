#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wppsc/powerflow.hpp"

namespace wppsc {

struct StateSpaceModel {
    Eigen::MatrixXd a;
    Eigen::MatrixXd b;
    Eigen::MatrixXd c;
    std::vector<std::string> state_labels;
    std::vector<std::string> input_labels;
    std::vector<std::string> output_labels;
};

using VectorFunction = std::function<void(std::span<const double>, std::span<double>)>;

/// Central-difference Jacobian with per-column step eps * max(1, |x_j|).
/// Throws NonFiniteDerivative on the first non-finite entry.
Eigen::MatrixXd numerical_jacobian(const VectorFunction& f, std::span<const double> x,
                                   std::size_t rows, double eps);

inline constexpr double kDefaultLinearizationStep = 1e-6;

/// A, B over the reference channels (p*, v*_g, v*_turb | q*), C over
/// (p_pc, |v_c|, q_pc). Requires a converged equilibrium.
StateSpaceModel linearize(const Scenario& scenario, const EquilibriumPoint& eq,
                          double eps = kDefaultLinearizationStep);

std::string input_label(RefChannel c);

}  // namespace wppsc
