#pragma once

// Nonlinear dq-frame models of the aggregated plant.
//
// Network pairs follow the branch convention L di/dt = -R i + jX i + (v_from - v_to):
// the (d, q) pair of a network quantity is the complex conjugate of the usual
// phasor. Converter controllers run in the conventional (q-leading) Park frame
// and see network quantities through to_controller_frame()/to_network_frame().
// All branch currents are positive flowing into the PCC.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wppsc/netbase.hpp"

namespace wppsc {

struct GridParams {
    double rg = 0.0;
    double xg = 0.5;
    double v_ref = 1.0;
    /// Source angle in the network frame; the study reference keeps it at zero.
    double angle = 0.0;

    ComplexPair source() const { return std::polar(v_ref, angle); }
};

struct ScParams {
    bool enabled = false;
    double x_sub = 0.55;  ///< sub-transient reactance X''
    double r_tr = 0.003;
    double x_tr = 0.3248;
    double emf = 1.0;  ///< magnitude of the internal source

    Impedance branch_impedance() const { return {r_tr, x_sub + x_tr}; }
};

enum class ControlType { gfl, gfm };
enum class QChannelMode { reactive, voltage };

struct GflParams {
    double kp_pll = 30.0;
    double ki_pll = 15000.0;
    double kp_pc = 0.01;
    double ki_pc = 20.0;
    double kp_cc = 0.2;
    double ki_cc = 20.0;
    QChannelMode q_mode = QChannelMode::reactive;
};

struct GfmParams {
    double j_vsm = 4.0;
    double d_p = 100.0;
    double kp_v = 2.0;
    double ki_v = 100.0;
    double kp_c = 0.5;
    double ki_c = 20.0;
};

/// Filter, array cable + WPP transformer, and PCC shunt. Inductances and
/// capacitances in pu seconds (X = omega0 L, X_C = 1/(omega0 C)).
struct FilterCableParams {
    double rf = 0.005;
    double lf = 0.08 / kNominalOmega;
    double cf = 1.0 / (15.0 * kNominalOmega);
    double ra = 0.01;
    double la = 0.02 / kNominalOmega;
    double rtf = 0.005;
    double ltf = 0.06 / kNominalOmega;
    double c_pcc = 1e-4;

    double r_atf() const { return ra + rtf; }
    double l_atf() const { return la + ltf; }
    double x_f(double omega0) const { return omega0 * lf; }
    double x_cf(double omega0) const { return 1.0 / (omega0 * cf); }
    double x_atf(double omega0) const { return omega0 * l_atf(); }
    Impedance atf_impedance(double omega0) const { return {r_atf(), x_atf(omega0)}; }
};

// ---------------------------------------------------------------------------
// State layout

/// Index map of the assembled state vector. Dimension is 16 without the
/// synchronous condenser and 18 with it, for either control type.
class StateLayout {
public:
    StateLayout(ControlType control, bool with_sc);

    ControlType control() const { return control_; }
    bool with_sc() const { return with_sc_; }
    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    std::optional<std::size_t> find(const std::string& label) const;

    // Offsets of the d component of each network pair.
    std::size_t i_g = 0;
    std::optional<std::size_t> i_sc;
    std::size_t i_f = 0;
    std::size_t v_c = 0;
    std::size_t i_a = 0;
    std::size_t v_pcc = 0;
    // Controller block: angle, {S | omega}, {gamma | M} pair, O pair.
    std::size_t angle = 0;
    std::size_t aux = 0;
    std::size_t outer = 0;
    std::size_t inner = 0;

private:
    ControlType control_;
    bool with_sc_;
    std::vector<std::string> labels_;
};

inline ComplexPair read_pair(std::span<const double> x, std::size_t at) {
    return {x[at], x[at + 1]};
}

inline void write_pair(std::span<double> x, std::size_t at, ComplexPair v) {
    x[at] = v.real();
    x[at + 1] = v.imag();
}

/// Network pair -> controller frame aligned at physical angle `theta`.
inline ComplexPair to_controller_frame(ComplexPair network, double theta) {
    return std::conj(network) * std::polar(1.0, -theta);
}

/// Controller-frame pair at angle `theta` -> network pair.
inline ComplexPair to_network_frame(ComplexPair local, double theta) {
    return std::conj(local * std::polar(1.0, theta));
}

/// Physical (conventional) phasor of a network pair.
inline ComplexPair to_phasor(ComplexPair network) { return std::conj(network); }

// ---------------------------------------------------------------------------
// Branch and node equations

/// L_g di_g/dt = -R_g i_g + jX_g i_g + v_g - v_pcc.
ComplexPair grid_rhs(ComplexPair i_g, ComplexPair v_pcc, const GridParams& p, double omega0);

/// (X''/omega0) di_sc/dt = -R_tr i_sc + j(X''+X_tr) i_sc + v_sc - v_pcc with
/// v_sc = emf * (cos phi_sc, sin phi_sc). Throws ContractViolation when disabled.
ComplexPair sc_rhs(ComplexPair i_sc, ComplexPair v_pcc, const ScParams& p, double phi_sc,
                   double omega0);

struct FilterCableDerivatives {
    ComplexPair di_f;
    ComplexPair dv_c;
    ComplexPair di_a;
};

FilterCableDerivatives filter_cable_rhs(ComplexPair i_f, ComplexPair v_c, ComplexPair i_a,
                                        ComplexPair v_pcc, ComplexPair v_inv,
                                        const FilterCableParams& p, double omega0);

/// C_pcc dv_pcc/dt = i_a + i_g + i_sc + j omega0 C_pcc v_pcc.
ComplexPair pcc_node_rhs(ComplexPair v_pcc, ComplexPair injected_current,
                         const FilterCableParams& p, double omega0);

// ---------------------------------------------------------------------------
// Converter controls (controller frame)

struct GflState {
    double theta = 0.0;  ///< PLL angle
    double s = 0.0;      ///< PLL integrator
    ComplexPair gamma;   ///< power-controller integrators (P, Q|V)
    ComplexPair o;       ///< current-controller integrators
};

struct GflRefs {
    double p = 0.0;
    double q = 0.0;  ///< reactive mode
    double v = 1.0;  ///< voltage mode
};

struct GflMeasurements {
    ComplexPair v;     ///< filter-capacitor voltage, PLL frame
    ComplexPair i;     ///< converter (filter) current, PLL frame
    ComplexPair v_ff;  ///< voltage feed-forward
    double p = 0.0;
    double q = 0.0;
};

struct GflOutput {
    double theta_dot = 0.0;  ///< absolute PLL frequency, rad/s
    double s_dot = 0.0;
    ComplexPair gamma_dot;
    ComplexPair o_dot;
    ComplexPair i_ref;
    ComplexPair v_inv_ref;
};

GflOutput gfl_rhs(const GflState& x, const GflParams& p, const GflRefs& refs,
                  const GflMeasurements& m, double omega0);

struct GfmState {
    double theta = 0.0;
    double omega = 0.0;  ///< VSM speed deviation, pu
    ComplexPair m;       ///< voltage-controller integrators
    ComplexPair o;       ///< current-controller integrators
};

struct GfmRefs {
    double p = 0.0;
    ComplexPair v{1.0, 0.0};
};

struct GfmMeasurements {
    ComplexPair v;     ///< filter-capacitor voltage, VSM frame
    ComplexPair i;     ///< converter (filter) current, VSM frame
    ComplexPair i_ff;  ///< grid-side current feed-forward
    ComplexPair v_ff;  ///< voltage feed-forward
    double p = 0.0;
};

struct GfmOutput {
    double theta_dot = 0.0;  ///< absolute, omega0 * (1 + omega)
    double omega_dot = 0.0;
    ComplexPair m_dot;
    ComplexPair o_dot;
    ComplexPair i_ref;
    ComplexPair v_inv_ref;
};

GfmOutput gfm_rhs(const GfmState& x, const GfmParams& p, const GfmRefs& refs,
                  const GfmMeasurements& m, double x_f, double x_cf, double omega0);

// ---------------------------------------------------------------------------
// Powers

struct PowerPair {
    double p = 0.0;
    double q = 0.0;
};

/// p = v_d i_d + v_q i_q, q = v_q i_d - v_d i_q.
PowerPair complex_power(ComplexPair v, ComplexPair i);

struct PlantPowers {
    double p_pc = 0.0, q_pc = 0.0;  ///< converter output (capacitor bus, array current)
    double p_g = 0.0, q_g = 0.0;    ///< grid source
    double p_sc = 0.0, q_sc = 0.0;  ///< SC internal source
};

}  // namespace wppsc
