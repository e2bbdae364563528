#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wppsc/components.hpp"
#include "wppsc/scenario.hpp"

namespace wppsc {

/// Reference values seen by the controllers and the grid source.
struct References {
    double p = 0.0;       ///< converter active-power reference
    double v_g = 1.0;     ///< grid source magnitude
    double v_turb = 1.0;  ///< turbine voltage reference (GFM, GFL voltage mode)
    double q = 0.0;       ///< GFL reactive-power reference

    double get(RefChannel c) const;
    void set(RefChannel c, double value);
};

struct ActiveFault {
    Bus bus = Bus::wt_mv;
    double r_fault = 1e-4;
};

/// Monitored signals.
struct Outputs {
    double p_pc = 0.0;
    double q_pc = 0.0;
    double v_c_mag = 0.0;
    double v_pcc_mag = 0.0;
    double i_g_mag = 0.0;
    double i_sc_mag = 0.0;
    double i_a_mag = 0.0;
    double i_fault_mag = 0.0;
};

/// Assembled ODE of one scenario: x' = f(x; refs, phi_sc, topology).
class SystemModel {
public:
    explicit SystemModel(const Scenario& scenario);

    const StateLayout& layout() const { return layout_; }
    std::size_t size() const { return layout_.size(); }
    double omega0() const { return omega0_; }

    const GridParams& grid() const { return grid_; }
    /// Angle of the grid source in the network frame; rotating it together with
    /// every network pair, the SC angle and the controller angle is a symmetry.
    void set_grid_angle(double angle) { grid_.angle = angle; }
    const ScParams& sc() const { return sc_; }
    const FilterCableParams& network() const { return net_; }
    ControlType control() const { return control_; }
    const GflParams& gfl() const { return gfl_; }
    const GfmParams& gfm() const { return gfm_; }

    References refs;
    double phi_sc = 0.0;

    /// Open converter: filter branch and controllers removed, states frozen.
    bool converter_connected() const { return converter_connected_; }
    void set_converter_connected(bool connected) { converter_connected_ = connected; }

    /// A faulted node with time constant C*r_fault below `algebraic_tau`
    /// is solved algebraically instead of integrated.
    void apply_fault(Bus bus, double r_fault, double algebraic_tau = 0.0);
    void clear_fault();
    const std::optional<ActiveFault>& fault() const { return fault_; }

    void rhs(std::span<const double> x, std::span<double> dx) const;
    std::vector<double> rhs(std::span<const double> x) const;

    /// Overwrites algebraic and frozen slots with their consistent values.
    void project(std::span<double> x) const;

    Outputs outputs(std::span<const double> x) const;
    PlantPowers measure_powers(std::span<const double> x) const;

    /// Sum of I^2 R over every resistive branch.
    double resistive_losses(std::span<const double> x) const;

    /// Stored magnetic and electric energy, 1/2 L|i|^2 + 1/2 C|v|^2.
    double stored_energy(std::span<const double> x) const;

    /// Names of the reference channels used as linearization inputs.
    std::vector<RefChannel> input_channels() const;

private:
    struct Effective {
        ComplexPair i_g, i_sc, i_f, v_c, i_a, v_pcc;
        bool v_c_algebraic = false;
        bool v_pcc_algebraic = false;
        bool i_a_frozen = false;
    };
    Effective effective(std::span<const double> x) const;
    double fault_conductance(Bus bus) const;
    bool node_algebraic(double capacitance, double conductance) const;

    StateLayout layout_;
    double omega0_;
    GridParams grid_;
    ScParams sc_;
    FilterCableParams net_;
    ControlType control_;
    GflParams gfl_;
    GfmParams gfm_;
    bool converter_connected_ = true;
    std::optional<ActiveFault> fault_;
    double algebraic_tau_ = 0.0;
};

}  // namespace wppsc
