#include "wppsc/linearize.hpp"

#include <algorithm>
#include <cmath>

#include "wppsc/errors.hpp"

namespace wppsc {

Eigen::MatrixXd numerical_jacobian(const VectorFunction& f, std::span<const double> x,
                                   std::size_t rows, double eps) {
    const std::size_t n = x.size();
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
    std::vector<double> xp(x.begin(), x.end());
    std::vector<double> fp(rows), fm(rows);

    for (std::size_t j = 0; j < n; ++j) {
        const double h = eps * std::max(1.0, std::abs(x[j]));
        xp[j] = x[j] + h;
        f(xp, fp);
        xp[j] = x[j] - h;
        f(xp, fm);
        xp[j] = x[j];
        // Actual spacing after rounding of x +/- h.
        const double span = (x[j] + h) - (x[j] - h);
        for (std::size_t i = 0; i < rows; ++i) {
            const double d = (fp[i] - fm[i]) / span;
            if (!std::isfinite(d)) {
                throw NonFiniteDerivative(i, j);
            }
            jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
        }
    }
    return jac;
}

std::string input_label(RefChannel c) {
    switch (c) {
        case RefChannel::p: return "p*";
        case RefChannel::v_g: return "v*_g";
        case RefChannel::v_turb: return "v*_turb";
        case RefChannel::q: return "q*";
    }
    return "?";
}

StateSpaceModel linearize(const Scenario& scenario, const EquilibriumPoint& eq, double eps) {
    if (!(eq.residual_norm < 1e-8)) {
        throw std::invalid_argument("linearize: equilibrium residual is not below 1e-8");
    }
    if (!(eps >= 1e-8 && eps <= 1e-4)) {
        throw std::invalid_argument("linearize: eps must lie in [1e-8, 1e-4]");
    }
    const SystemModel model = make_model(scenario, eq);
    const std::size_t n = model.size();
    const std::vector<RefChannel> channels = model.input_channels();

    StateSpaceModel ss;
    ss.state_labels = model.layout().labels();
    for (RefChannel c : channels) {
        ss.input_labels.push_back(input_label(c));
    }
    ss.output_labels = {"p_pc", "|v_c|", "q_pc"};

    ss.a = numerical_jacobian([&](std::span<const double> x, std::span<double> dx) {
        model.rhs(x, dx);
    }, eq.state, n, eps);

    std::vector<double> u(channels.size());
    for (std::size_t k = 0; k < channels.size(); ++k) {
        u[k] = model.refs.get(channels[k]);
    }
    ss.b = numerical_jacobian([&](std::span<const double> uu, std::span<double> dx) {
        SystemModel m = model;
        for (std::size_t k = 0; k < channels.size(); ++k) {
            m.refs.set(channels[k], uu[k]);
        }
        m.rhs(eq.state, dx);
    }, u, n, eps);

    ss.c = numerical_jacobian([&](std::span<const double> x, std::span<double> y) {
        const Outputs o = model.outputs(x);
        y[0] = o.p_pc;
        y[1] = o.v_c_mag;
        y[2] = o.q_pc;
    }, eq.state, 3, eps);
    return ss;
}

}  // namespace wppsc
