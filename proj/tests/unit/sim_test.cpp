#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "wppsc/analysis.hpp"
#include "wppsc/sim.hpp"

using namespace wppsc;

namespace {

Scenario nominal(int grid_case, ControlType control, bool sc) {
    const Scenario base = default_scenario();
    return sweep_scenario(base, base.study.grid_cases.at(grid_case), control, sc, {1.0, 1.0, 1.0});
}

Event fault(double t, Event::Kind kind, Bus bus, double r = 1e-4) {
    Event e;
    e.t = t;
    e.kind = kind;
    e.bus = bus;
    e.r_fault = r;
    return e;
}

double max_state_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

}  // namespace

TEST(Rk4, ScalarDecay) {
    Rk4 rk4(1);
    std::vector<double> x{1.0}, next(1);
    const auto f = [](std::span<const double> a, std::span<double> b) { b[0] = -a[0]; };
    for (int k = 0; k < 1000; ++k) {
        rk4.step(f, x, 1e-3, next);
        x.swap(next);
    }
    EXPECT_NEAR(x[0], std::exp(-1.0), 1e-10);
}

TEST(Rk4, FourthOrderOnOscillator) {
    Eigen::Matrix2d a;
    a << -0.3, 20.0, -20.0, -0.3;
    auto run = [&](double dt) {
        Rk4 rk4(2);
        std::vector<double> x{1.0, 0.0}, next(2);
        const auto f = [&](std::span<const double> u, std::span<double> du) {
            du[0] = a(0, 0) * u[0] + a(0, 1) * u[1];
            du[1] = a(1, 0) * u[0] + a(1, 1) * u[1];
        };
        const long steps = std::lround(1.0 / dt);
        for (long k = 0; k < steps; ++k) {
            rk4.step(f, x, dt, next);
            x.swap(next);
        }
        // Cross-check against the independent linear RK4.
        const Eigen::VectorXd ref = oracle::rk4_linear(a, Eigen::Vector2d(1.0, 0.0), dt, steps);
        EXPECT_NEAR(x[0], ref[0], 1e-12);
        return x;
    };
    const auto xr = run(1e-3 / 8.0);
    const auto x1 = run(1e-2), x2 = run(5e-3);
    const double e1 = std::hypot(x1[0] - xr[0], x1[1] - xr[1]);
    const double e2 = std::hypot(x2[0] - xr[0], x2[1] - xr[1]);
    EXPECT_GT(e1 / e2, 12.0);
    EXPECT_LT(e1 / e2, 20.0);
}

TEST(Integrate, EquilibriumHold) {
    const Scenario s = nominal(1, ControlType::gfm, true);
    const EquilibriumPoint eq = solve_operating_point(s, s.op);
    const SimResult r = integrate(make_model(s, eq), eq.state, 5.0, s.sim.dt, {});
    ASSERT_FALSE(r.diverged());
    EXPECT_LT(max_state_distance(r.final_state, eq.state), 1e-6);
    EXPECT_DOUBLE_EQ(r.final_time, 5.0);
    EXPECT_EQ(r.series.rows(), 100001u);
}

TEST(Integrate, SignalsAndDecimation) {
    const Scenario s = nominal(1, ControlType::gfl, false);
    const EquilibriumPoint eq = solve_operating_point(s, s.op);
    SimOptions opt;
    opt.record_every = 10;
    const SimResult r = integrate(make_model(s, eq), eq.state, 0.01, 5e-5, {}, opt);
    EXPECT_EQ(r.series.rows(), 21u);
    EXPECT_EQ(r.series.names.size(), eq.state.size() + derived_signal_names().size());
    EXPECT_EQ(r.series.names.front(), make_model(s, eq).layout().labels().front());
    EXPECT_NEAR(r.series.column("p_pc").back(), 1.0, 1e-8);
    opt.record_states = false;
    const SimResult q = integrate(make_model(s, eq), eq.state, 0.01, 5e-5, {}, opt);
    EXPECT_EQ(q.series.names, derived_signal_names());
}

TEST(Integrate, RejectsBadStep) {
    const Scenario s = nominal(1, ControlType::gfl, false);
    const EquilibriumPoint eq = solve_operating_point(s, s.op);
    EXPECT_THROW(integrate(make_model(s, eq), eq.state, 0.1, 1e-2, {}), std::invalid_argument);
    EXPECT_THROW(integrate(make_model(s, eq), eq.state, 0.1, 1e-7, {}), std::invalid_argument);
}

TEST(Integrate, GridOnlyPccFault) {
    Scenario s = default_scenario();
    const EquilibriumPoint eq = solve_passive_network(s);
    SystemModel m = make_model(s, eq);
    m.set_converter_connected(false);
    const SimResult r =
        integrate(m, eq.state, 0.5, 5e-5, {fault(0.0, Event::Kind::fault_on, Bus::pcc)});
    ASSERT_FALSE(r.diverged());
    const Impedance z = s.grid_z();
    const double expected = oracle::fault_current(1.0, z.r, z.x);
    EXPECT_NEAR(r.series.column("i_g_mag").back(), expected, 0.005 * expected);
}

TEST(Integrate, BoltedFaultCollapsesBusVoltage) {
    const Scenario s = nominal(0, ControlType::gfm, true);
    const EquilibriumPoint eq = solve_operating_point(s, s.op);
    const SimResult r = integrate(make_model(s, eq), eq.state, 0.02, 5e-5,
                                  {fault(0.0, Event::Kind::fault_on, Bus::wt_mv)});
    ASSERT_FALSE(r.diverged());
    EXPECT_LT(r.series.column("v_c_mag").back(), 0.01);
}

TEST(Integrate, ClearedFaultReturnsToEquilibrium) {
    const Scenario s = nominal(1, ControlType::gfm, true);
    const EquilibriumPoint eq = solve_operating_point(s, s.op);
    const SimResult r = integrate(make_model(s, eq), eq.state, 6.0, 5e-5,
                                  {fault(0.1, Event::Kind::fault_on, Bus::pcc, 0.05),
                                   fault(0.15, Event::Kind::fault_off, Bus::pcc)});
    ASSERT_FALSE(r.diverged()) << *r.series.aborted;
    EXPECT_LT(max_state_distance(r.final_state, eq.state), 1e-4);
}

TEST(Integrate, VacuousFaultIsInvisible) {
    const Scenario s = nominal(0, ControlType::gfl, true);
    const EquilibriumPoint eq = solve_operating_point(s, s.op);
    Event step;
    step.t = 0.01;
    step.kind = Event::Kind::step_ref;
    step.channel = RefChannel::p;
    step.delta = -0.1;
    const SimResult plain = integrate(make_model(s, eq), eq.state, 0.2, 5e-5, {step});
    auto deviation = [&](double r_fault) {
        const SimResult vacuous = integrate(
            make_model(s, eq), eq.state, 0.2, 5e-5,
            {step, fault(0.0, Event::Kind::fault_on, Bus::wt_mv, r_fault)});
        EXPECT_EQ(plain.series.rows(), vacuous.series.rows());
        double d = 0.0;
        for (std::size_t c = 0; c < eq.state.size(); ++c) {
            for (std::size_t k = 0; k < plain.series.rows(); ++k) {
                d = std::max(d, std::abs(plain.series.columns[c][k] - vacuous.series.columns[c][k]));
            }
        }
        return d;
    };
    // The only difference is the leakage |v|/r_fault, so it scales as 1/r_fault.
    const double d9 = deviation(1e9), d10 = deviation(1e10);
    EXPECT_LT(d9, 1e-8);
    EXPECT_NEAR(d9 / d10, 10.0, 0.5);
    EXPECT_LT(deviation(1e12), 1e-11);
}

TEST(Integrate, EventsSnapToStepBoundaries) {
    const Scenario s = nominal(1, ControlType::gfm, false);
    const EquilibriumPoint eq = solve_operating_point(s, s.op);
    Event step;
    step.kind = Event::Kind::step_ref;
    step.channel = RefChannel::p;
    step.delta = 0.1;
    step.t = 0.0100002;  // snaps to 0.01 at dt = 1e-4
    const SimResult a = integrate(make_model(s, eq), eq.state, 0.05, 1e-4, {step});
    step.t = 0.01;
    const SimResult b = integrate(make_model(s, eq), eq.state, 0.05, 1e-4, {step});
    EXPECT_EQ(a.final_state, b.final_state);
}

TEST(Integrate, DivergenceIsReportedWithPartialSeries) {
    const Scenario s = nominal(0, ControlType::gfl, false);
    const EquilibriumPoint eq = solve_operating_point(s, s.op);
    Event step;
    step.kind = Event::Kind::step_ref;
    step.channel = RefChannel::p;
    step.delta = 0.01;
    const SimResult r = integrate(make_model(s, eq), eq.state, 30.0, 1e-4, {step});
    ASSERT_TRUE(r.diverged());
    EXPECT_LT(r.final_time, 30.0);
    EXPECT_GT(r.series.rows(), 1u);
    for (double v : r.final_state) EXPECT_TRUE(std::isfinite(v));
}
