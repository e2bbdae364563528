#include <gtest/gtest.h>

#include <numbers>

#include "wppsc/components.hpp"
#include "wppsc/errors.hpp"

using namespace wppsc;

namespace {

constexpr double w0 = 2.0 * std::numbers::pi * 50.0;

void expect_pair(ComplexPair got, double d, double q, double tol) {
    EXPECT_NEAR(got.real(), d, tol);
    EXPECT_NEAR(got.imag(), q, tol);
}

}  // namespace

TEST(GridBranch, EquilibriumWhenVoltagesMatch) {
    const GridParams p{0.1, 0.5, 1.0, 0.0};
    expect_pair(grid_rhs({0.0, 0.0}, {1.0, 0.0}, p, w0), 0.0, 0.0, 0.0);
}

TEST(GridBranch, HandEvaluatedDerivative) {
    const GridParams p{0.1, 0.5, 1.0, 0.0};
    const double l_g = 0.5 / w0;
    // (-0.02 + 0.1)/L_g and (0.5 * 0.2)/L_g
    expect_pair(grid_rhs({0.2, 0.0}, {0.9, 0.0}, p, w0), 0.08 / l_g, 0.1 / l_g, 1e-10);
    expect_pair(grid_rhs({0.2, 0.0}, {0.9, 0.0}, p, w0), 50.265, 62.832, 1e-3);
}

TEST(GridBranch, PureRotation) {
    const GridParams p{0.0, 0.5, 1.0, 0.0};
    expect_pair(grid_rhs({1.0, 0.0}, {1.0, 0.0}, p, w0), 0.0, w0, 1e-10);
}

TEST(ScBranch, EquilibriumWhenVoltagesMatch) {
    ScParams p;
    p.enabled = true;
    expect_pair(sc_rhs({0.0, 0.0}, {1.0, 0.0}, p, 0.0, w0), 0.0, 0.0, 0.0);
}

TEST(ScBranch, HandEvaluatedDerivative) {
    ScParams p;
    p.enabled = true;
    p.x_sub = 0.2;
    p.x_tr = 0.05;
    p.r_tr = 0.0;
    expect_pair(sc_rhs({0.0, 0.0}, {0.95, 0.0}, p, 0.0, w0), 0.05 * w0 / 0.2, 0.0, 1e-10);
    EXPECT_NEAR(0.05 * w0 / 0.2, 78.54, 1e-2);
}

TEST(ScBranch, BoltedFaultCurrent) {
    ScParams p;
    p.enabled = true;
    p.x_sub = 0.2;
    p.x_tr = 0.05;
    p.r_tr = 0.0;
    // Zero derivative with v_pcc = 0: (-r + j x) i = -E.
    const ComplexPair i = -std::polar(p.emf, 0.3) / ComplexPair{-p.r_tr, p.x_sub + p.x_tr};
    expect_pair(sc_rhs(i, {0.0, 0.0}, p, 0.3, w0), 0.0, 0.0, 1e-9);
    EXPECT_NEAR(std::abs(i), 4.0, 1e-12);
}

TEST(ScBranch, DisabledIsContractViolation) {
    ScParams p;
    p.enabled = false;
    EXPECT_THROW(sc_rhs({0.0, 0.0}, {1.0, 0.0}, p, 0.0, w0), ContractViolation);
}

TEST(GflControl, LockedPll) {
    GflParams p;
    const GflMeasurements m{{1.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}, 0.5, 0.0};
    const GflOutput out = gfl_rhs(GflState{}, p, GflRefs{0.5, 0.0, 1.0}, m, w0);
    EXPECT_DOUBLE_EQ(out.theta_dot, w0);
    EXPECT_DOUBLE_EQ(out.s_dot, 0.0);
}

TEST(GflControl, CurrentControllerAtReference) {
    GflParams p;
    GflState x;
    x.gamma = {0.4, 0.0};
    x.o = {0.03, -0.02};
    GflMeasurements m{{1.0, 0.0}, {}, {1.0, 0.0}, 0.0, 0.0};
    // Choose the measured current equal to the reference the outer loop produces.
    const GflOutput probe = gfl_rhs(x, p, GflRefs{0.0, 0.0, 1.0}, m, w0);
    m.i = probe.i_ref;
    const GflOutput out = gfl_rhs(x, p, GflRefs{0.0, 0.0, 1.0}, m, w0);
    expect_pair(out.o_dot, 0.0, 0.0, 0.0);
    expect_pair(out.v_inv_ref - m.v_ff, p.ki_cc * x.o.real(), p.ki_cc * x.o.imag(), 1e-15);
}

TEST(GflControl, PllArithmetic) {
    GflParams p;
    p.kp_pll = 20.0;
    p.ki_pll = 400.0;
    GflState x;
    x.s = 0.002;
    const GflMeasurements m{{1.0, 0.01}, {}, {}, 0.0, 0.0};
    const GflOutput out = gfl_rhs(x, p, GflRefs{}, m, w0);
    EXPECT_NEAR(out.theta_dot, w0 + 0.2 + 0.8, 1e-12);
    EXPECT_NEAR(out.theta_dot, 315.159, 1e-3);
}

TEST(GfmControl, SynchronizedVsm) {
    GfmParams p;
    GfmMeasurements m;
    m.p = 0.7;
    const GfmOutput out = gfm_rhs(GfmState{}, p, GfmRefs{0.7, {1.0, 0.0}}, m, 0.08, 15.0, w0);
    EXPECT_DOUBLE_EQ(out.omega_dot, 0.0);
    EXPECT_DOUBLE_EQ(out.theta_dot, w0);
}

TEST(GfmControl, SwingArithmetic) {
    GfmParams p;
    p.j_vsm = 10.0;
    p.d_p = 50.0;
    GfmState x;
    x.omega = 0.001;
    GfmMeasurements m;
    m.p = 0.5;
    const GfmOutput out = gfm_rhs(x, p, GfmRefs{0.6, {1.0, 0.0}}, m, 0.08, 15.0, w0);
    EXPECT_NEAR(out.omega_dot, 0.005, 1e-15);
}

TEST(GfmControl, CapacitorCurrentFeedForward) {
    GfmParams p;
    GfmMeasurements m;
    m.v = {1.01, -0.02};
    m.i_ff = {0.6, 0.1};
    const double x_cf = 15.0;
    const GfmOutput out = gfm_rhs(GfmState{}, p, GfmRefs{0.0, m.v}, m, 0.08, x_cf, w0);
    const ComplexPair expected = ComplexPair{0.0, 1.0} * m.v / x_cf;
    expect_pair(out.i_ref - m.i_ff, expected.real(), expected.imag(), 1e-15);
}

TEST(FilterCable, RestStateHasZeroDerivative) {
    FilterCableParams p;
    const ComplexPair v{1.0, 0.0};
    const auto d = filter_cable_rhs({}, v, {}, v, v, p, w0);
    // The capacitor keeps its frame-rotation term; the currents are at rest.
    expect_pair(d.di_f, 0.0, 0.0, 0.0);
    expect_pair(d.di_a, 0.0, 0.0, 0.0);
    const auto z = filter_cable_rhs({}, {}, {}, {}, {}, p, w0);
    expect_pair(z.dv_c, 0.0, 0.0, 0.0);
}

TEST(FilterCable, FilterInductorArithmetic) {
    FilterCableParams p;
    p.rf = 0.01;
    p.lf = 0.1 / w0;
    const auto d = filter_cable_rhs({1.0, 0.0}, {0.0, 0.0}, {}, {}, {0.01, 0.0}, p, w0);
    expect_pair(d.di_f * p.lf, 0.0, 0.1, 1e-15);
    expect_pair(d.di_f, 0.0, w0, 1e-10);
}

TEST(FilterCable, CapacitorBalance) {
    FilterCableParams p;
    const auto d = filter_cable_rhs({0.4, 0.1}, {1.0, 0.0}, {0.4, 0.1}, {1.0, 0.0}, {}, p, w0);
    expect_pair(d.dv_c, 0.0, w0, 1e-9);
}

TEST(PccNode, KclSatisfied) {
    FilterCableParams p;
    expect_pair(pcc_node_rhs({0.0, 0.0}, {0.0, 0.0}, p, w0), 0.0, 0.0, 0.0);
}

TEST(PccNode, NetInjection) {
    FilterCableParams p;
    p.c_pcc = 1e-4;
    expect_pair(pcc_node_rhs({0.0, 0.0}, {0.01, 0.0}, p, w0), 100.0, 0.0, 1e-12);
    expect_pair(pcc_node_rhs({1.0, 0.0}, {0.0, 0.0}, p, w0), 0.0, w0, 1e-10);
}

TEST(ComplexPower, Examples) {
    PowerPair s = complex_power({1.0, 0.0}, {1.0, 0.0});
    EXPECT_DOUBLE_EQ(s.p, 1.0);
    EXPECT_DOUBLE_EQ(s.q, 0.0);
    s = complex_power({1.0, 0.0}, {0.0, 1.0});
    EXPECT_DOUBLE_EQ(s.p, 0.0);
    EXPECT_DOUBLE_EQ(s.q, -1.0);
    s = complex_power({0.98, 0.02}, {0.5, -0.1});
    EXPECT_NEAR(s.p, 0.488, 1e-15);
    EXPECT_NEAR(s.q, 0.108, 1e-15);
}

TEST(Frames, ControllerRoundTrip) {
    const ComplexPair net{0.8, -0.35};
    for (double theta : {-2.0, 0.0, 0.4, 3.0}) {
        const ComplexPair local = to_controller_frame(net, theta);
        const ComplexPair back = to_network_frame(local, theta);
        expect_pair(back, net.real(), net.imag(), 1e-15);
        EXPECT_NEAR(std::abs(local), std::abs(net), 1e-15);
    }
}

TEST(StateLayout, Dimensions) {
    EXPECT_EQ(StateLayout(ControlType::gfl, false).size(), 16u);
    EXPECT_EQ(StateLayout(ControlType::gfl, true).size(), 18u);
    EXPECT_EQ(StateLayout(ControlType::gfm, false).size(), 16u);
    const StateLayout lay(ControlType::gfm, true);
    EXPECT_EQ(lay.size(), 18u);
    ASSERT_TRUE(lay.i_sc.has_value());
    EXPECT_EQ(lay.find(lay.labels()[lay.angle]), lay.angle);
    EXPECT_EQ(lay.find(lay.labels()[*lay.i_sc]), *lay.i_sc);
    EXPECT_FALSE(lay.find("no_such_state").has_value());
    // Labels are unique.
    std::vector<std::string> sorted = lay.labels();
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
}
