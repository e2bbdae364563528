#include "wppsc/scr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>

#include "wppsc/errors.hpp"
#include "wppsc/model.hpp"
#include "wppsc/powerflow.hpp"
#include "wppsc/sim.hpp"

namespace wppsc {

double scr_base(double z_g) {
    if (!(z_g > 0.0)) {
        throw DomainError("scr_base: z_g must be positive");
    }
    return 1.0 / z_g;
}

double scr_wt(double z_g, double z_atf) {
    if (!(z_g > 0.0) || !(z_atf >= 0.0)) {
        throw DomainError("scr_wt: z_g must be positive and z_atf non-negative");
    }
    return 1.0 / (z_g + z_atf);
}

double escr_with_sc(const ScrInputs& in) {
    if (!in.z_sc) {
        return scr_wt(in.z_g, in.z_atf);
    }
    if (!(in.z_atf >= 0.0)) {
        throw DomainError("escr_with_sc: z_atf must be non-negative");
    }
    return 1.0 / (parallel_magnitude(in.z_g, *in.z_sc) + in.z_atf);
}

double escr_rational(const ScrInputs& in) {
    if (!in.z_sc) {
        return scr_wt(in.z_g, in.z_atf);
    }
    const double zg = in.z_g;
    const double zs = *in.z_sc;
    if (!(zg > 0.0) || !(zs > 0.0) || !(in.z_atf >= 0.0)) {
        throw DomainError("escr_rational: impedances must be positive");
    }
    return (zg + zs) / (zg * zs + in.z_atf * (zg + zs));
}

ScrInputs scr_inputs(const Scenario& scenario) {
    ScrInputs in;
    in.z_g = scenario.grid_z().magnitude();
    in.z_atf = scenario.network.atf_impedance(scenario.omega0()).magnitude();
    if (scenario.sc.enabled) {
        in.z_sc = scenario.sc.branch_impedance().magnitude();
    }
    return in;
}

double escr_complex(const Scenario& scenario) {
    const ComplexPair zg = scenario.grid_z().complex();
    const ComplexPair zatf = scenario.network.atf_impedance(scenario.omega0()).complex();
    ComplexPair z = zg;
    if (scenario.sc.enabled) {
        z = parallel_complex(scenario.grid_z(), scenario.sc.branch_impedance()).complex();
    }
    return 1.0 / std::abs(z + zatf);
}

const std::array<Table3Row, 3>& table3() {
    static const std::array<Table3Row, 3> rows{{
        {"weak", 1.6, 2.67, 2.58},
        {"normal", 3.2, 4.28, 4.11},
        {"strong", 4.12, 5.71, 5.37},
    }};
    return rows;
}

Table3Fit evaluate_table3(double z_sc, double z_atf) {
    Table3Fit fit;
    fit.z_sc = z_sc;
    fit.z_atf = z_atf;
    const auto& rows = table3();
    for (std::size_t k = 0; k < rows.size(); ++k) {
        fit.z_g[k] = 1.0 / rows[k].scr_o - z_atf;
        fit.scr_o[k] = scr_wt(fit.z_g[k], z_atf);
        fit.scr_sc[k] = escr_with_sc({fit.z_g[k], z_sc, z_atf});
        fit.residual_o[k] = (fit.scr_o[k] - rows[k].scr_o) / rows[k].scr_o;
        fit.residual_sc[k] = (fit.scr_sc[k] - rows[k].scr_sc_theory) / rows[k].scr_sc_theory;
        fit.cost += fit.residual_o[k] * fit.residual_o[k] + fit.residual_sc[k] * fit.residual_sc[k];
        if (std::abs(fit.residual_o[k]) > 0.10 || std::abs(fit.residual_sc[k]) > 0.10) {
            fit.flagged = true;
        }
    }
    return fit;
}

namespace {

/// Scan then Brent on the bracket around the best sample.
template <class F>
std::pair<double, double> minimize_1d(F f, double lo, double hi, int samples = 64) {
    double best_x = lo;
    double best_f = std::numeric_limits<double>::infinity();
    const double h = (hi - lo) / samples;
    for (int k = 0; k <= samples; ++k) {
        const double x = lo + h * k;
        const double v = f(x);
        if (v < best_f) {
            best_f = v;
            best_x = x;
        }
    }
    const double a = std::max(lo, best_x - h);
    const double b = std::min(hi, best_x + h);
    const auto r = boost::math::tools::brent_find_minima(f, a, b, 52);
    if (r.second < best_f) {
        return r;
    }
    return {best_x, best_f};
}

}  // namespace

Table3Fit fit_to_table3() {
    const double z_atf_max = 1.0 / table3()[2].scr_o * (1.0 - 1e-9);
    auto inner = [](double z_atf) {
        return minimize_1d([&](double z_sc) { return evaluate_table3(z_sc, z_atf).cost; }, 1e-3,
                           5.0);
    };
    const auto outer = minimize_1d([&](double z_atf) { return inner(z_atf).second; }, 0.0,
                                   z_atf_max, 32);
    return evaluate_table3(inner(outer.first).first, outer.first);
}

FaultMeasurement measure_scr_from_fault(const Scenario& scenario, Bus bus,
                                        const FaultMeasurementOptions& options) {
    const double dt = options.dt.value_or(scenario.sim.dt);
    if (!(options.average > 0.0) || !(options.window >= 2.0 * options.average)) {
        throw std::invalid_argument(
            "measure_scr_from_fault: fault window must span two averaging windows");
    }
    const EquilibriumPoint eq = solve_passive_network(scenario);
    SystemModel model(scenario);
    model.set_converter_connected(false);
    model.phi_sc = eq.phi_sc;
    model.refs = eq.refs;

    const StateLayout& lay = model.layout();
    const std::size_t bus_at = bus == Bus::pcc ? lay.v_pcc : lay.v_c;
    const double v_prefault = std::abs(read_pair(eq.state, bus_at));

    Event on;
    on.t = 0.0;
    on.kind = Event::Kind::fault_on;
    on.bus = bus;
    on.r_fault = options.r_fault;
    SimOptions sim_options;
    sim_options.record_states = true;
    SimResult run = integrate(model, eq.state, options.window, dt, {on}, sim_options);
    if (run.diverged()) {
        throw MeasurementInvalid("fault run aborted: " + *run.series.aborted);
    }

    // Average the fault-current phasor so rotating DC offsets cancel per cycle.
    const TimeSeries& ts = run.series;
    const std::vector<double>& vd = ts.columns[bus_at];
    const std::vector<double>& vq = ts.columns[bus_at + 1];
    const double t_end = ts.t.back();
    auto window_mean = [&](double from, double to) {
        ComplexPair sum{};
        std::size_t count = 0;
        for (std::size_t k = 0; k < ts.rows(); ++k) {
            if (ts.t[k] > from + 0.5 * dt && ts.t[k] <= to + 0.5 * dt) {
                sum += ComplexPair{vd[k], vq[k]} / options.r_fault;
                ++count;
            }
        }
        return count ? std::abs(sum / static_cast<double>(count)) : 0.0;
    };
    const double last = window_mean(t_end - options.average, t_end);
    const double previous = window_mean(t_end - 2.0 * options.average, t_end - options.average);

    FaultMeasurement m;
    m.v_prefault = v_prefault;
    m.i_fault = last;
    m.drift = last > 0.0 ? std::abs(last - previous) / last : 1.0;
    m.scr = v_prefault * last;
    if (options.keep_series) {
        m.series = std::move(run.series);
    }
    if (!(m.drift <= options.drift_tolerance)) {
        throw MeasurementInvalid("fault current not settled: drift " + std::to_string(m.drift) +
                                 " across the final window");
    }
    return m;
}

ScrReport scr_report(const Scenario& scenario, const std::string& name, bool simulate,
                     const FaultMeasurementOptions& options) {
    Scenario with_sc = scenario;
    with_sc.sc.enabled = true;
    Scenario without_sc = scenario;
    without_sc.sc.enabled = false;

    const ScrInputs in = scr_inputs(with_sc);
    ScrReport r;
    r.name = name;
    r.scr_base = scr_base(in.z_g);
    r.scr_o = scr_wt(in.z_g, in.z_atf);
    r.scr_sc_theory = escr_with_sc(in);
    r.scr_sc_theory_complex = escr_complex(with_sc);
    if (simulate) {
        r.scr_o_sim = measure_scr_from_fault(without_sc, Bus::wt_mv, options).scr;
        r.scr_sc_sim = measure_scr_from_fault(with_sc, Bus::wt_mv, options).scr;
        r.rel_dev = std::abs(r.scr_sc_theory - *r.scr_sc_sim) / r.scr_sc_theory;
    }
    return r;
}

std::vector<ScrReport> scr_study(const Scenario& base, bool simulate,
                                 const FaultMeasurementOptions& options) {
    std::vector<ScrReport> reports;
    for (const NamedGridCase& gc : base.study.grid_cases) {
        Scenario s = base;
        s.name = gc.name;
        s.grid_case = gc.grid;
        s.grid_impedance.reset();
        reports.push_back(scr_report(s, gc.name, simulate, options));
    }
    return reports;
}

}  // namespace wppsc
