#include "wppsc/model.hpp"

#include <cmath>
#include <stdexcept>

namespace wppsc {

namespace {
constexpr ComplexPair kJ{0.0, 1.0};
}

double References::get(RefChannel c) const {
    switch (c) {
        case RefChannel::p: return p;
        case RefChannel::v_g: return v_g;
        case RefChannel::v_turb: return v_turb;
        case RefChannel::q: return q;
    }
    return 0.0;
}

void References::set(RefChannel c, double value) {
    switch (c) {
        case RefChannel::p: p = value; break;
        case RefChannel::v_g: v_g = value; break;
        case RefChannel::v_turb: v_turb = value; break;
        case RefChannel::q: q = value; break;
    }
}

SystemModel::SystemModel(const Scenario& scenario)
    : layout_(scenario.control, scenario.sc.enabled),
      omega0_(scenario.omega0()),
      grid_(scenario.grid_params()),
      sc_(scenario.sc),
      net_(scenario.network),
      control_(scenario.control),
      gfl_(scenario.gfl),
      gfm_(scenario.gfm) {
    refs.p = scenario.op.p_turb_ref;
    refs.v_g = scenario.op.v_g_ref;
    refs.v_turb = scenario.op.v_turb_ref;
}

void SystemModel::apply_fault(Bus bus, double r_fault, double algebraic_tau) {
    if (!(r_fault > 0.0)) {
        throw std::invalid_argument("apply_fault: r_fault must be positive");
    }
    fault_ = ActiveFault{bus, r_fault};
    algebraic_tau_ = algebraic_tau;
}

void SystemModel::clear_fault() {
    fault_.reset();
    algebraic_tau_ = 0.0;
}

double SystemModel::fault_conductance(Bus bus) const {
    if (fault_ && fault_->bus == bus) {
        return 1.0 / fault_->r_fault;
    }
    return 0.0;
}

bool SystemModel::node_algebraic(double capacitance, double conductance) const {
    return conductance > 0.0 && (capacitance == 0.0 || capacitance / conductance < algebraic_tau_);
}

SystemModel::Effective SystemModel::effective(std::span<const double> x) const {
    Effective e;
    e.i_g = read_pair(x, layout_.i_g);
    if (layout_.i_sc) {
        e.i_sc = read_pair(x, *layout_.i_sc);
    }
    e.i_f = converter_connected_ ? read_pair(x, layout_.i_f) : ComplexPair{};
    e.i_a = read_pair(x, layout_.i_a);
    e.v_c = read_pair(x, layout_.v_c);
    e.v_pcc = read_pair(x, layout_.v_pcc);

    const double g_c = fault_conductance(Bus::wt_mv);
    const double g_p = fault_conductance(Bus::pcc);
    const double c_c = converter_connected_ ? net_.cf : 0.0;

    if (c_c == 0.0 && g_c == 0.0) {
        // Open-ended array cable.
        e.i_a = {};
        e.i_a_frozen = true;
    }

    if (node_algebraic(net_.c_pcc, g_p)) {
        e.v_pcc = (e.i_a + e.i_g + e.i_sc) / (g_p - kJ * omega0_ * net_.c_pcc);
        e.v_pcc_algebraic = true;
    }

    if (c_c == 0.0 && g_c == 0.0) {
        e.v_c = e.v_pcc;
        e.v_c_algebraic = true;
    } else if (node_algebraic(c_c, g_c)) {
        e.v_c = (e.i_f - e.i_a) / (g_c - kJ * omega0_ * c_c);
        e.v_c_algebraic = true;
    }
    return e;
}

std::vector<RefChannel> SystemModel::input_channels() const {
    if (control_ == ControlType::gfl && gfl_.q_mode == QChannelMode::reactive) {
        return {RefChannel::p, RefChannel::v_g, RefChannel::q};
    }
    return {RefChannel::p, RefChannel::v_g, RefChannel::v_turb};
}

void SystemModel::rhs(std::span<const double> x, std::span<double> dx) const {
    const Effective e = effective(x);
    std::fill(dx.begin(), dx.end(), 0.0);

    GridParams grid = grid_;
    grid.v_ref = refs.v_g;
    write_pair(dx, layout_.i_g, grid_rhs(e.i_g, e.v_pcc, grid, omega0_));
    if (layout_.i_sc) {
        write_pair(dx, *layout_.i_sc, sc_rhs(e.i_sc, e.v_pcc, sc_, phi_sc, omega0_));
    }

    ComplexPair v_inv;
    if (converter_connected_) {
        const double theta = x[layout_.angle];
        const ComplexPair v_loc = to_controller_frame(e.v_c, theta);
        const ComplexPair i_loc = to_controller_frame(e.i_f, theta);
        const PowerPair s_out = complex_power(to_phasor(e.v_c), to_phasor(e.i_a));

        if (control_ == ControlType::gfl) {
            const GflState state{x[layout_.angle], x[layout_.aux], read_pair(x, layout_.outer),
                                 read_pair(x, layout_.inner)};
            const GflRefs gr{refs.p, refs.q, refs.v_turb};
            const GflMeasurements m{v_loc, i_loc, v_loc, s_out.p, s_out.q};
            const GflOutput out = gfl_rhs(state, gfl_, gr, m, omega0_);
            dx[layout_.angle] = out.theta_dot - omega0_;
            dx[layout_.aux] = out.s_dot;
            write_pair(dx, layout_.outer, out.gamma_dot);
            write_pair(dx, layout_.inner, out.o_dot);
            v_inv = to_network_frame(out.v_inv_ref, theta);
        } else {
            const GfmState state{x[layout_.angle], x[layout_.aux], read_pair(x, layout_.outer),
                                 read_pair(x, layout_.inner)};
            const GfmRefs gr{refs.p, ComplexPair{refs.v_turb, 0.0}};
            const GfmMeasurements m{v_loc, i_loc, to_controller_frame(e.i_a, theta), v_loc,
                                    s_out.p};
            const GfmOutput out =
                gfm_rhs(state, gfm_, gr, m, net_.x_f(omega0_), net_.x_cf(omega0_), omega0_);
            dx[layout_.angle] = out.theta_dot - omega0_;
            dx[layout_.aux] = out.omega_dot;
            write_pair(dx, layout_.outer, out.m_dot);
            write_pair(dx, layout_.inner, out.o_dot);
            v_inv = to_network_frame(out.v_inv_ref, theta);
        }

        const FilterCableDerivatives d =
            filter_cable_rhs(e.i_f, e.v_c, e.i_a, e.v_pcc, v_inv, net_, omega0_);
        write_pair(dx, layout_.i_f, d.di_f);
        if (!e.v_c_algebraic) {
            const ComplexPair shunt = fault_conductance(Bus::wt_mv) * e.v_c / net_.cf;
            write_pair(dx, layout_.v_c, d.dv_c - shunt);
        }
        write_pair(dx, layout_.i_a, d.di_a);
    } else if (!e.i_a_frozen) {
        const ComplexPair di_a =
            (e.v_c - net_.r_atf() * e.i_a + kJ * net_.x_atf(omega0_) * e.i_a - e.v_pcc) /
            net_.l_atf();
        write_pair(dx, layout_.i_a, di_a);
    }

    if (!e.v_pcc_algebraic) {
        const ComplexPair injected = e.i_a + e.i_g + e.i_sc;
        const ComplexPair shunt = fault_conductance(Bus::pcc) * e.v_pcc / net_.c_pcc;
        write_pair(dx, layout_.v_pcc, pcc_node_rhs(e.v_pcc, injected, net_, omega0_) - shunt);
    }
}

std::vector<double> SystemModel::rhs(std::span<const double> x) const {
    std::vector<double> dx(x.size());
    rhs(x, dx);
    return dx;
}

void SystemModel::project(std::span<double> x) const {
    const Effective e = effective(x);
    if (!converter_connected_) {
        write_pair(x, layout_.i_f, {});
    }
    if (e.i_a_frozen) {
        write_pair(x, layout_.i_a, {});
    }
    if (e.v_c_algebraic) {
        write_pair(x, layout_.v_c, e.v_c);
    }
    if (e.v_pcc_algebraic) {
        write_pair(x, layout_.v_pcc, e.v_pcc);
    }
}

PlantPowers SystemModel::measure_powers(std::span<const double> x) const {
    const Effective e = effective(x);
    PlantPowers s;
    if (converter_connected_) {
        const PowerPair pc = complex_power(to_phasor(e.v_c), to_phasor(e.i_a));
        s.p_pc = pc.p;
        s.q_pc = pc.q;
    }
    const PowerPair g =
        complex_power(to_phasor(ComplexPair{refs.v_g, 0.0} * std::polar(1.0, grid_.angle)),
                      to_phasor(e.i_g));
    s.p_g = g.p;
    s.q_g = g.q;
    if (layout_.i_sc) {
        const PowerPair sc =
            complex_power(to_phasor(std::polar(sc_.emf, phi_sc)), to_phasor(e.i_sc));
        s.p_sc = sc.p;
        s.q_sc = sc.q;
    }
    return s;
}

Outputs SystemModel::outputs(std::span<const double> x) const {
    const Effective e = effective(x);
    const PlantPowers s = measure_powers(x);
    Outputs o;
    o.p_pc = s.p_pc;
    o.q_pc = s.q_pc;
    o.v_c_mag = std::abs(e.v_c);
    o.v_pcc_mag = std::abs(e.v_pcc);
    o.i_g_mag = std::abs(e.i_g);
    o.i_sc_mag = std::abs(e.i_sc);
    o.i_a_mag = std::abs(e.i_a);
    if (fault_) {
        const ComplexPair v = fault_->bus == Bus::pcc ? e.v_pcc : e.v_c;
        o.i_fault_mag = std::abs(v) / fault_->r_fault;
    }
    return o;
}

double SystemModel::resistive_losses(std::span<const double> x) const {
    const Effective e = effective(x);
    return grid_.rg * std::norm(e.i_g) + sc_.r_tr * std::norm(e.i_sc) +
           net_.rf * std::norm(e.i_f) + net_.r_atf() * std::norm(e.i_a);
}

double SystemModel::stored_energy(std::span<const double> x) const {
    const Effective e = effective(x);
    double w = grid_.xg / omega0_ * std::norm(e.i_g) + net_.l_atf() * std::norm(e.i_a) +
               net_.c_pcc * std::norm(e.v_pcc);
    if (layout_.i_sc) {
        w += sc_.x_sub / omega0_ * std::norm(e.i_sc);
    }
    if (converter_connected_) {
        w += net_.lf * std::norm(e.i_f) + net_.cf * std::norm(e.v_c);
    }
    return 0.5 * w;
}

}  // namespace wppsc
