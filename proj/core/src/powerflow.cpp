#include "wppsc/powerflow.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "wppsc/errors.hpp"
#include "wppsc/linearize.hpp"

namespace wppsc {

namespace {

constexpr ComplexPair kJ{0.0, 1.0};

/// Physical (conventional) phasors of a steady state.
struct PhasorState {
    ComplexPair v_c, v_pcc, i_g, i_sc, i_a, i_f, v_inv;
    bool converter = true;
};

struct NetworkData {
    ComplexPair v_g, e_sc, z_g, z_sc, z_atf, y_pcc, y_cf, z_f;
    bool with_sc = false;
};

NetworkData network_data(const Scenario& s, const OperatingPoint& op, double phi_sc) {
    const double w0 = s.omega0();
    const Impedance zg = s.grid_z();
    NetworkData d;
    d.v_g = {op.v_g_ref, 0.0};
    d.z_g = zg.complex();
    d.with_sc = s.sc.enabled;
    if (d.with_sc) {
        d.e_sc = to_phasor(std::polar(s.sc.emf, phi_sc));
        d.z_sc = s.sc.branch_impedance().complex();
    }
    d.z_atf = s.network.atf_impedance(w0).complex();
    d.y_pcc = kJ * w0 * s.network.c_pcc;
    d.y_cf = kJ * w0 * s.network.cf;
    d.z_f = {s.network.rf, s.network.x_f(w0)};
    return d;
}

/// v_pcc = a * v_c + b from PCC current balance.
std::pair<ComplexPair, ComplexPair> pcc_map(const NetworkData& d, bool converter) {
    ComplexPair y = 1.0 / d.z_g + d.y_pcc;
    ComplexPair src = d.v_g / d.z_g;
    if (d.with_sc) {
        y += 1.0 / d.z_sc;
        src += d.e_sc / d.z_sc;
    }
    if (!converter) {
        return {0.0, src / y};
    }
    y += 1.0 / d.z_atf;
    return {(1.0 / d.z_atf) / y, src / y};
}

PhasorState complete(const NetworkData& d, ComplexPair v_c, bool converter) {
    const auto [a, b] = pcc_map(d, converter);
    PhasorState s;
    s.converter = converter;
    s.v_pcc = a * v_c + b;
    s.v_c = converter ? v_c : s.v_pcc;
    s.i_a = converter ? (s.v_c - s.v_pcc) / d.z_atf : ComplexPair{};
    s.i_g = (d.v_g - s.v_pcc) / d.z_g;
    s.i_sc = d.with_sc ? (d.e_sc - s.v_pcc) / d.z_sc : ComplexPair{};
    s.i_f = converter ? s.i_a + d.y_cf * s.v_c : ComplexPair{};
    s.v_inv = s.v_c + d.z_f * s.i_f;
    return s;
}

/// Solves c0 + c1 cos(t) + c2 sin(t) = target on the branch where the
/// function increases; clips to the maximum when unreachable.
double solve_sinusoid(const std::function<double(double)>& f, double target, bool& reachable) {
    const double f0 = f(0.0);
    const double fpi = f(std::numbers::pi);
    const double fhalf = f(0.5 * std::numbers::pi);
    const double c0 = 0.5 * (f0 + fpi);
    const double c1 = 0.5 * (f0 - fpi);
    const double c2 = fhalf - c0;
    const double amp = std::hypot(c1, c2);
    const double phase = std::atan2(c2, c1);
    double c = amp > 0.0 ? (target - c0) / amp : 0.0;
    reachable = std::abs(c) <= 1.0;
    c = std::clamp(c, -1.0, 1.0);
    return phase - std::acos(c);
}

PhasorState phasor_load_flow(const Scenario& s, const OperatingPoint& op, bool& reachable) {
    const NetworkData d = network_data(s, op, 0.0);
    auto power = [&](double delta) {
        const PhasorState st = complete(d, std::polar(op.v_turb_ref, delta), true);
        return (st.v_c * std::conj(st.i_a)).real();
    };
    const double delta = solve_sinusoid(power, op.p_turb_ref, reachable);
    return complete(d, std::polar(op.v_turb_ref, delta), true);
}

void store_network(const StateLayout& lay, const PhasorState& ph, std::vector<double>& x) {
    write_pair(x, lay.i_g, std::conj(ph.i_g));
    if (lay.i_sc) {
        write_pair(x, *lay.i_sc, std::conj(ph.i_sc));
    }
    write_pair(x, lay.i_f, std::conj(ph.i_f));
    write_pair(x, lay.v_c, std::conj(ph.v_c));
    write_pair(x, lay.i_a, std::conj(ph.i_a));
    write_pair(x, lay.v_pcc, std::conj(ph.v_pcc));
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double e : v) {
        m = std::max(m, std::abs(e));
    }
    return m;
}

}  // namespace

EquilibriumPoint initial_guess(const Scenario& scenario, const OperatingPoint& op) {
    const SystemModel model(scenario);
    const StateLayout& lay = model.layout();
    const double w0 = scenario.omega0();

    bool reachable = true;
    const PhasorState ph = phasor_load_flow(scenario, op, reachable);

    EquilibriumPoint eq;
    eq.state.assign(lay.size(), 0.0);
    store_network(lay, ph, eq.state);

    const double theta = std::arg(ph.v_c);
    const ComplexPair rot = std::polar(1.0, -theta);
    const ComplexPair v_loc = ph.v_c * rot;
    const ComplexPair i_loc = ph.i_f * rot;
    const ComplexPair ia_loc = ph.i_a * rot;
    const ComplexPair vinv_loc = ph.v_inv * rot;
    eq.state[lay.angle] = theta;

    eq.refs.p = op.p_turb_ref;
    eq.refs.v_g = op.v_g_ref;
    eq.refs.v_turb = op.v_turb_ref;
    eq.refs.q = complex_power(ph.v_c, ph.i_a).q;

    if (scenario.control == ControlType::gfl) {
        const GflParams& g = scenario.gfl;
        eq.state[lay.aux] = 0.0;
        const ComplexPair gamma =
            g.ki_pc > 0.0 ? ComplexPair{i_loc.real() / g.ki_pc, -i_loc.imag() / g.ki_pc}
                          : ComplexPair{};
        write_pair(eq.state, lay.outer, gamma);
        write_pair(eq.state, lay.inner, g.ki_cc > 0.0 ? (vinv_loc - v_loc) / g.ki_cc : 0.0);
    } else {
        const GfmParams& g = scenario.gfm;
        const double x_f = scenario.network.x_f(w0);
        const double x_cf = scenario.network.x_cf(w0);
        eq.state[lay.aux] = 0.0;
        write_pair(eq.state, lay.outer,
                   g.ki_v > 0.0 ? (i_loc - ia_loc - kJ * v_loc / x_cf) / g.ki_v : 0.0);
        write_pair(eq.state, lay.inner,
                   g.ki_c > 0.0 ? (vinv_loc - v_loc - kJ * x_f * i_loc) / g.ki_c : 0.0);
    }
    eq.phi_sc = 0.0;
    return eq;
}

SystemModel make_model(const Scenario& scenario, const EquilibriumPoint& eq) {
    SystemModel model(scenario);
    model.refs = eq.refs;
    model.phi_sc = eq.phi_sc;
    return model;
}

EquilibriumPoint solve_operating_point(const Scenario& scenario, const OperatingPoint& op,
                                       const NewtonOptions& options) {
    EquilibriumPoint eq = initial_guess(scenario, op);
    SystemModel model = make_model(scenario, eq);
    const StateLayout& lay = model.layout();
    const std::size_t n = lay.size();
    const bool free_phi = lay.with_sc();
    const bool free_q =
        scenario.control == ControlType::gfl && scenario.gfl.q_mode == QChannelMode::reactive;
    const std::size_t n_extra = (free_phi ? 1 : 0) + (free_q ? 1 : 0);
    const std::size_t m = n + n_extra;
    const double w0 = model.omega0();

    std::vector<double> z(eq.state);
    if (free_phi) z.push_back(eq.phi_sc);
    if (free_q) z.push_back(eq.refs.q);

    auto unpack = [&](std::span<const double> zz, SystemModel& mdl) {
        std::size_t k = n;
        if (free_phi) mdl.phi_sc = zz[k++];
        if (free_q) mdl.refs.q = zz[k++];
    };

    auto residual = [&](std::span<const double> zz, std::span<double> r) {
        SystemModel mdl = model;
        unpack(zz, mdl);
        mdl.rhs(zz.first(n), r.first(n));
        std::size_t k = n;
        if (free_phi) {
            // Internal source delivers no active power.
            r[k++] = w0 * mdl.measure_powers(zz.first(n)).p_sc;
        }
        if (free_q) {
            const ComplexPair v_c = read_pair(zz, lay.v_c);
            r[k++] = w0 * (std::abs(v_c) - mdl.refs.v_turb);
        }
    };

    std::vector<double> r(m), trial(m), r_trial(m);
    residual(z, r);
    double norm = max_abs(r);
    int it = 0;
    bool stagnated = false;

    while (norm > options.target_residual && it < options.max_iterations) {
        ++it;
        const Eigen::MatrixXd jac = numerical_jacobian(residual, z, m, 1e-7);
        const Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(m));
        const Eigen::VectorXd step = jac.fullPivLu().solve(rv);

        double alpha = 1.0;
        bool accepted = false;
        for (int h = 0; h <= options.max_halvings; ++h) {
            for (std::size_t k = 0; k < m; ++k) {
                trial[k] = z[k] - alpha * step[static_cast<Eigen::Index>(k)];
            }
            residual(trial, r_trial);
            const double trial_norm = max_abs(r_trial);
            if (std::isfinite(trial_norm) && trial_norm < norm) {
                z.swap(trial);
                r.swap(r_trial);
                norm = trial_norm;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            stagnated = true;
            break;
        }
    }

    eq.state.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
    unpack(z, model);
    eq.phi_sc = model.phi_sc;
    eq.refs = model.refs;
    eq.iterations = it;
    eq.residual_norm = max_abs(model.rhs(eq.state));

    if (!(norm <= options.accept_residual) || !(eq.residual_norm < options.accept_residual)) {
        if ((stagnated || it >= options.max_iterations) && !(norm < options.infeasible_residual)) {
            throw Infeasible(norm);
        }
        throw NonConvergence(it, norm);
    }

    for (std::size_t at : {lay.v_c, lay.v_pcc}) {
        const double v = std::abs(read_pair(eq.state, at));
        if (!(v > 0.5 && v < 1.5)) {
            throw Infeasible(norm);
        }
    }
    return eq;
}

EquilibriumPoint solve_passive_network(const Scenario& scenario) {
    SystemModel model(scenario);
    model.set_converter_connected(false);
    const StateLayout& lay = model.layout();

    auto build = [&](double phi) { return complete(network_data(scenario, scenario.op, phi),
                                                   {}, false); };
    double phi = 0.0;
    if (lay.with_sc()) {
        auto internal_power = [&](double p) {
            const PhasorState st = build(p);
            return (to_phasor(std::polar(scenario.sc.emf, p)) * std::conj(st.i_sc)).real();
        };
        // Two roots; keep the one nearest zero angle.
        bool reachable = true;
        const double f0 = internal_power(0.0);
        const double fpi = internal_power(std::numbers::pi);
        const double fhalf = internal_power(0.5 * std::numbers::pi);
        const double c0 = 0.5 * (f0 + fpi);
        const double c1 = 0.5 * (f0 - fpi);
        const double c2 = fhalf - c0;
        const double amp = std::hypot(c1, c2);
        const double phase = std::atan2(c2, c1);
        const double c = amp > 0.0 ? -c0 / amp : 0.0;
        reachable = std::abs(c) <= 1.0;
        if (!reachable) {
            throw Infeasible(std::abs(c0) - amp);
        }
        auto wrap = [](double a) { return std::remainder(a, 2.0 * std::numbers::pi); };
        const double r1 = wrap(phase - std::acos(c));
        const double r2 = wrap(phase + std::acos(c));
        phi = std::abs(r1) < std::abs(r2) ? r1 : r2;
    }

    const PhasorState ph = build(phi);
    EquilibriumPoint eq;
    eq.state.assign(lay.size(), 0.0);
    store_network(lay, ph, eq.state);
    eq.phi_sc = phi;
    eq.refs.p = 0.0;
    eq.refs.v_g = scenario.op.v_g_ref;
    eq.refs.v_turb = scenario.op.v_turb_ref;
    model.phi_sc = phi;
    model.refs = eq.refs;
    model.project(eq.state);
    eq.residual_norm = max_abs(model.rhs(eq.state));
    return eq;
}

}  // namespace wppsc
