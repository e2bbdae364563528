#include "wppsc/components.hpp"

#include <algorithm>

#include "wppsc/errors.hpp"

namespace wppsc {

namespace {
constexpr ComplexPair kJ{0.0, 1.0};
}

StateLayout::StateLayout(ControlType control, bool with_sc) : control_(control), with_sc_(with_sc) {
    auto add_pair = [this](const std::string& name) {
        const std::size_t at = labels_.size();
        labels_.push_back(name + "_d");
        labels_.push_back(name + "_q");
        return at;
    };
    i_g = add_pair("i_g");
    if (with_sc) {
        i_sc = add_pair("i_sc");
    }
    i_f = add_pair("i_f");
    v_c = add_pair("v_c");
    i_a = add_pair("i_a");
    v_pcc = add_pair("v_pcc");

    angle = labels_.size();
    if (control == ControlType::gfl) {
        labels_.push_back("theta_pll");
        aux = labels_.size();
        labels_.push_back("s_pll");
        outer = add_pair("gamma");
    } else {
        labels_.push_back("theta_pc");
        aux = labels_.size();
        labels_.push_back("omega_pc");
        outer = add_pair("m");
    }
    inner = add_pair("o");
}

std::optional<std::size_t> StateLayout::find(const std::string& label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - labels_.begin());
}

ComplexPair grid_rhs(ComplexPair i_g, ComplexPair v_pcc, const GridParams& p, double omega0) {
    const double l_g = p.xg / omega0;
    return (-p.rg * i_g + kJ * p.xg * i_g + p.source() - v_pcc) / l_g;
}

ComplexPair sc_rhs(ComplexPair i_sc, ComplexPair v_pcc, const ScParams& p, double phi_sc,
                   double omega0) {
    if (!p.enabled) {
        throw ContractViolation("sc_rhs called with the synchronous condenser disabled");
    }
    const double l_sc = p.x_sub / omega0;
    const ComplexPair v_sc = std::polar(p.emf, phi_sc);
    return (-p.r_tr * i_sc + kJ * (p.x_sub + p.x_tr) * i_sc + v_sc - v_pcc) / l_sc;
}

FilterCableDerivatives filter_cable_rhs(ComplexPair i_f, ComplexPair v_c, ComplexPair i_a,
                                        ComplexPair v_pcc, ComplexPair v_inv,
                                        const FilterCableParams& p, double omega0) {
    FilterCableDerivatives d;
    d.di_f = (-p.rf * i_f + kJ * p.x_f(omega0) * i_f - v_c + v_inv) / p.lf;
    d.dv_c = (i_f + kJ * omega0 * p.cf * v_c - i_a) / p.cf;
    d.di_a = (v_c - p.r_atf() * i_a + kJ * p.x_atf(omega0) * i_a - v_pcc) / p.l_atf();
    return d;
}

ComplexPair pcc_node_rhs(ComplexPair v_pcc, ComplexPair injected_current,
                         const FilterCableParams& p, double omega0) {
    return (injected_current + kJ * omega0 * p.c_pcc * v_pcc) / p.c_pcc;
}

GflOutput gfl_rhs(const GflState& x, const GflParams& p, const GflRefs& refs,
                  const GflMeasurements& m, double omega0) {
    GflOutput out;
    out.theta_dot = omega0 + p.kp_pll * m.v.imag() + p.ki_pll * x.s;
    out.s_dot = m.v.imag();

    const double e_p = refs.p - m.p;
    const double e_q =
        p.q_mode == QChannelMode::reactive ? refs.q - m.q : refs.v - std::abs(m.v);
    out.gamma_dot = {e_p, e_q};
    // q = v_q i_d - v_d i_q, so reactive output rises as i_q falls.
    out.i_ref = {p.kp_pc * e_p + p.ki_pc * x.gamma.real(),
                 -(p.kp_pc * e_q + p.ki_pc * x.gamma.imag())};

    out.o_dot = out.i_ref - m.i;
    out.v_inv_ref = m.v_ff + p.kp_cc * (out.i_ref - m.i) + p.ki_cc * x.o;
    return out;
}

GfmOutput gfm_rhs(const GfmState& x, const GfmParams& p, const GfmRefs& refs,
                  const GfmMeasurements& m, double x_f, double x_cf, double omega0) {
    GfmOutput out;
    out.theta_dot = omega0 * (1.0 + x.omega);
    out.omega_dot = (refs.p - m.p - p.d_p * x.omega) / p.j_vsm;

    const ComplexPair dv = refs.v - m.v;
    out.m_dot = dv;
    out.i_ref = m.i_ff + p.kp_v * dv + p.ki_v * x.m + kJ * m.v / x_cf;

    out.o_dot = out.i_ref - m.i;
    out.v_inv_ref = m.v_ff + p.kp_c * (out.i_ref - m.i) + p.ki_c * x.o + kJ * x_f * m.i;
    return out;
}

PowerPair complex_power(ComplexPair v, ComplexPair i) {
    return {v.real() * i.real() + v.imag() * i.imag(), v.imag() * i.real() - v.real() * i.imag()};
}

}  // namespace wppsc
