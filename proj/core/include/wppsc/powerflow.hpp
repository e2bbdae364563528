#pragma once

#include <vector>

#include "wppsc/model.hpp"
#include "wppsc/scenario.hpp"

namespace wppsc {

struct EquilibriumPoint {
    std::vector<double> state;
    double phi_sc = 0.0;
    /// Resolved references, including the solved GFL reactive setpoint.
    References refs;
    double residual_norm = 0.0;  ///< infinity norm of the full RHS, pu/s
    int iterations = 0;
};

struct NewtonOptions {
    int max_iterations = 50;
    int max_halvings = 8;
    double target_residual = 1e-10;
    double accept_residual = 1e-8;
    double infeasible_residual = 1e-3;
};

/// Flat start refined by a phasor load flow of the network with the converter
/// as a P-|V| source at its capacitor bus. SC angle starts at zero; controller
/// integrators are back-computed from the required steady outputs.
EquilibriumPoint initial_guess(const Scenario& scenario, const OperatingPoint& op);

/// Damped Newton on the full RHS plus the free unknowns (SC internal angle with
/// zero internal power, GFL reactive setpoint for |v_c| = v_turb_ref).
/// Throws NonConvergence or Infeasible.
EquilibriumPoint solve_operating_point(const Scenario& scenario, const OperatingPoint& op,
                                       const NewtonOptions& options = {});

/// Model with references and SC angle taken from a solved equilibrium.
SystemModel make_model(const Scenario& scenario, const EquilibriumPoint& eq);

/// Steady state of the network with the converter disconnected.
EquilibriumPoint solve_passive_network(const Scenario& scenario);

}  // namespace wppsc
