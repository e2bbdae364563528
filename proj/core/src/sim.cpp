#include "wppsc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wppsc {

namespace {

std::string time_string(double t) {
    std::ostringstream os;
    os.precision(9);
    os << t;
    return os.str();
}

bool finite_and_bounded(std::span<const double> x, bool& non_finite) {
    non_finite = false;
    for (double v : x) {
        if (!std::isfinite(v)) {
            non_finite = true;
            return false;
        }
        if (std::abs(v) > kDivergenceThreshold) {
            return false;
        }
    }
    return true;
}

void apply_event(SystemModel& model, const Event& e, double dt, double algebraic_steps) {
    switch (e.kind) {
        case Event::Kind::fault_on:
            model.apply_fault(e.bus, e.r_fault, algebraic_steps * dt);
            break;
        case Event::Kind::fault_off:
            model.clear_fault();
            break;
        case Event::Kind::step_ref:
            model.refs.set(e.channel, model.refs.get(e.channel) + e.delta);
            break;
    }
}

}  // namespace

std::vector<std::string> derived_signal_names() {
    return {"p_pc",    "q_pc",     "p_g",      "q_g",      "p_sc",    "q_sc",    "v_c_mag",
            "v_pcc_mag", "i_g_mag", "i_sc_mag", "i_a_mag", "i_fault_mag"};
}

SimResult integrate(SystemModel model, std::vector<double> x0, double t_end, double dt,
                    std::vector<Event> events, const SimOptions& options) {
    if (!(dt >= 1e-6 && dt <= 1e-3)) {
        throw std::invalid_argument("integrate: dt must lie in [1e-6, 1e-3] s");
    }
    if (!(t_end >= 0.0)) {
        throw std::invalid_argument("integrate: t_end must be non-negative");
    }
    if (x0.size() != model.size()) {
        throw std::invalid_argument("integrate: initial state has the wrong dimension");
    }
    for (double v : x0) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("integrate: initial state is not finite");
        }
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });

    const std::size_t n = model.size();
    const auto steps = static_cast<long>(std::llround(t_end / dt));
    const std::size_t every = std::max<std::size_t>(1, options.record_every);

    SimResult result;
    TimeSeries& ts = result.series;
    ts.dt = dt * static_cast<double>(every);
    if (options.record_states) {
        for (const std::string& label : model.layout().labels()) {
            ts.add_column(label);
        }
    }
    for (const std::string& name : derived_signal_names()) {
        ts.add_column(name);
    }

    std::vector<double> x = std::move(x0);
    auto record = [&](long k) {
        ts.t.push_back(static_cast<double>(k) * dt);
        std::size_t c = 0;
        if (options.record_states) {
            for (std::size_t i = 0; i < n; ++i) {
                ts.columns[c++].push_back(x[i]);
            }
        }
        const Outputs o = model.outputs(x);
        const PlantPowers s = model.measure_powers(x);
        for (double v : {o.p_pc, o.q_pc, s.p_g, s.q_g, s.p_sc, s.q_sc, o.v_c_mag, o.v_pcc_mag,
                         o.i_g_mag, o.i_sc_mag, o.i_a_mag, o.i_fault_mag}) {
            ts.columns[c++].push_back(v);
        }
    };

    std::size_t next_event = 0;
    auto fire_events = [&](long k) {
        while (next_event < events.size() &&
               std::llround(events[next_event].t / dt) <= k) {
            apply_event(model, events[next_event], dt, options.algebraic_steps);
            ++next_event;
        }
        model.project(x);
    };

    Rk4 rk4(n);
    std::vector<double> tmp(n);
    const auto f = [&model](std::span<const double> a, std::span<double> b) { model.rhs(a, b); };
    fire_events(0);
    record(0);
    for (long k = 1; k <= steps; ++k) {
        rk4.step(f, x, dt, tmp);
        model.project(tmp);

        bool non_finite = false;
        if (!finite_and_bounded(tmp, non_finite)) {
            const double t = static_cast<double>(k) * dt;
            ts.aborted = (non_finite ? "non-finite state at t=" : "diverged at t=") +
                         time_string(t) + " s; last valid state at t=" +
                         time_string(t - dt) + " s";
            if (ts.t.empty() || ts.t.back() != static_cast<double>(k - 1) * dt) {
                record(k - 1);
            }
            result.final_time = static_cast<double>(k - 1) * dt;
            result.final_state = x;
            return result;
        }
        x.swap(tmp);
        fire_events(k);
        if (k % static_cast<long>(every) == 0 || k == steps) {
            record(k);
        }
    }
    result.final_time = static_cast<double>(steps) * dt;
    result.final_state = std::move(x);
    return result;
}

SimResult simulate(const Scenario& scenario, const EquilibriumPoint& eq,
                   const SimOptions& options) {
    return integrate(make_model(scenario, eq), eq.state, scenario.sim.t_end, scenario.sim.dt,
                     scenario.events, options);
}

}  // namespace wppsc
