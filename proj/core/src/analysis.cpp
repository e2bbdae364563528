#include "wppsc/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include "wppsc/errors.hpp"
#include "wppsc/powerflow.hpp"

namespace wppsc {

const std::vector<double>& TimeSeries::column(const std::string& name) const {
    const auto k = find(name);
    if (!k) {
        throw std::out_of_range("TimeSeries: no column '" + name + "'");
    }
    return columns[*k];
}

std::optional<double> damping(std::complex<double> lambda) {
    const double mag = std::abs(lambda);
    if (mag == 0.0) {
        return std::nullopt;
    }
    return -lambda.real() / mag;
}

std::vector<std::complex<double>> spectrum(const Eigen::MatrixXd& a) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    if (es.info() != Eigen::Success) {
        std::ostringstream dump;
        dump << "eigensolver did not converge; A =\n" << a;
        throw EigenSolverFailure(dump.str());
    }
    const Eigen::VectorXcd ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

std::vector<EigenRecord> eigenvalues(const StateSpaceModel& ss) {
    const Eigen::Index n = ss.a.rows();
    if (!ss.a.allFinite()) {
        throw EigenSolverFailure("state matrix contains non-finite entries");
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(ss.a, true);
    if (es.info() != Eigen::Success) {
        std::ostringstream dump;
        dump << "eigensolver did not converge; A =\n" << ss.a;
        throw EigenSolverFailure(dump.str());
    }
    const Eigen::VectorXcd lambda = es.eigenvalues();
    const Eigen::MatrixXcd right = es.eigenvectors();
    const Eigen::FullPivLU<Eigen::MatrixXcd> lu(right);
    const bool have_left = lu.isInvertible();
    Eigen::MatrixXcd left;
    if (have_left) {
        left = lu.inverse();
    }

    // Conjugates of complex eigenvalues are consumed with their partner.
    const double pair_tol = 1e-9;
    std::vector<EigenRecord> records;
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::complex<double> l = lambda[i];
        if (l.imag() < -pair_tol * std::max(1.0, std::abs(l))) {
            continue;
        }
        EigenRecord r;
        r.re = l.real();
        r.im = std::abs(l.imag()) <= pair_tol * std::max(1.0, std::abs(l)) ? 0.0 : l.imag();
        r.conjugate_pair = r.im != 0.0;
        r.freq_hz = std::abs(r.im) / (2.0 * std::numbers::pi);
        r.damping = damping({r.re, r.im}).value_or(std::numeric_limits<double>::quiet_NaN());

        if (have_left && !ss.state_labels.empty()) {
            std::vector<double> part(static_cast<std::size_t>(n));
            for (Eigen::Index k = 0; k < n; ++k) {
                part[static_cast<std::size_t>(k)] = std::abs(left(i, k) * right(k, i));
            }
            const double total = std::accumulate(part.begin(), part.end(), 0.0);
            std::vector<std::size_t> order(part.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return part[a] > part[b]; });
            for (std::size_t k = 0; k < std::min<std::size_t>(3, order.size()); ++k) {
                if (total > 0.0 && part[order[k]] / total < 1e-6) break;
                r.dominant_states.push_back(ss.state_labels[order[k]]);
            }
        }
        records.push_back(std::move(r));
    }
    std::stable_sort(records.begin(), records.end(), [](const EigenRecord& a, const EigenRecord& b) {
        if (a.re != b.re) return a.re > b.re;
        return a.im > b.im;
    });
    return records;
}

bool is_poorly_damped_near_synchronous(const EigenRecord& r) {
    return r.conjugate_pair && r.damping < kWellDampedRatio && r.freq_hz >= 40.0 &&
           r.freq_hz <= 60.0;
}

StabilityReport classify(const std::vector<EigenRecord>& records, double tol) {
    StabilityReport rep;
    rep.solved = true;
    rep.stable = true;
    rep.max_re = -std::numeric_limits<double>::infinity();
    rep.min_damping_below_100hz = 1.0;
    for (const EigenRecord& r : records) {
        if (r.magnitude() < kNullModeMagnitude) {
            ++rep.null_modes;
            continue;
        }
        rep.max_re = std::max(rep.max_re, r.re);
        if (!(r.re < tol)) {
            rep.stable = false;
        }
        if (r.freq_hz < 100.0) {
            rep.min_damping_below_100hz = std::min(rep.min_damping_below_100hz, r.damping);
        }
        if (is_poorly_damped_near_synchronous(r)) {
            ++rep.poorly_damped_near_sync;
        }
    }
    rep.eigen = records;
    return rep;
}

std::size_t step_input_index(const StateSpaceModel& ss, StepChannel channel) {
    auto find = [&](const std::string& label) -> std::optional<std::size_t> {
        for (std::size_t k = 0; k < ss.input_labels.size(); ++k) {
            if (ss.input_labels[k] == label) return k;
        }
        return std::nullopt;
    };
    if (channel == StepChannel::power) {
        if (auto k = find("p*")) return *k;
    } else {
        if (auto k = find("v*_turb")) return *k;
        if (auto k = find("q*")) return *k;
    }
    throw std::invalid_argument("step_response: model has no input for the requested channel");
}

std::string step_output_label(StepChannel channel) {
    return channel == StepChannel::power ? "p_pc" : "|v_c|";
}

TimeSeries step_response(const StateSpaceModel& ss, StepChannel channel, double magnitude,
                         double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end > 0.0)) {
        throw std::invalid_argument("step_response: dt and t_end must be positive");
    }
    const Eigen::Index input = static_cast<Eigen::Index>(step_input_index(ss, channel));
    const Eigen::VectorXd forcing = ss.b.col(input) * magnitude;
    const Eigen::Index n = ss.a.rows();

    TimeSeries ts;
    ts.dt = dt;
    ts.meta = "linear step on " + ss.input_labels[static_cast<std::size_t>(input)];
    for (const std::string& label : ss.output_labels) {
        ts.add_column(label);
    }

    auto f = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return ss.a * x + forcing; };
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    const auto steps = static_cast<long>(std::llround(t_end / dt));
    auto record = [&](long k) {
        ts.t.push_back(static_cast<double>(k) * dt);
        const Eigen::VectorXd y = ss.c * x;
        for (Eigen::Index o = 0; o < y.size(); ++o) {
            ts.columns[static_cast<std::size_t>(o)].push_back(y[o]);
        }
    };
    record(0);
    for (long k = 1; k <= steps; ++k) {
        const Eigen::VectorXd k1 = f(x);
        const Eigen::VectorXd k2 = f(x + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = f(x + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = f(x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e6) {
            ts.aborted = "diverged at t=" + std::to_string(static_cast<double>(k) * dt);
            break;
        }
        record(k);
    }
    return ts;
}

std::vector<ModalWeight> modal_step_weights(const StateSpaceModel& ss, StepChannel channel) {
    const auto input = static_cast<Eigen::Index>(step_input_index(ss, channel));
    const std::string out_label = step_output_label(channel);
    const auto out_it = std::find(ss.output_labels.begin(), ss.output_labels.end(), out_label);
    if (out_it == ss.output_labels.end()) {
        throw std::invalid_argument("modal_step_weights: model has no output '" + out_label + "'");
    }
    const auto output = static_cast<Eigen::Index>(out_it - ss.output_labels.begin());

    Eigen::EigenSolver<Eigen::MatrixXd> es(ss.a, true);
    if (es.info() != Eigen::Success) {
        throw EigenSolverFailure("eigensolver did not converge");
    }
    const Eigen::VectorXcd lambda = es.eigenvalues();
    const Eigen::MatrixXcd right = es.eigenvectors();
    const Eigen::FullPivLU<Eigen::MatrixXcd> lu(right);
    if (!lu.isInvertible()) {
        throw EigenSolverFailure("state matrix is defective; modal weights undefined");
    }
    const Eigen::MatrixXcd left = lu.inverse();
    const Eigen::VectorXcd cv = ss.c.row(output).cast<std::complex<double>>() * right;
    const Eigen::VectorXcd wb = left * ss.b.col(input).cast<std::complex<double>>();

    std::vector<ModalWeight> out;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        const std::complex<double> l = lambda[i];
        if (!(l.imag() > 0.0) || std::abs(l) < kNullModeMagnitude) continue;
        const double zeta = damping(l).value_or(1.0);
        if (zeta >= kOscillatoryDampingLimit) continue;
        ModalWeight m;
        m.mode.re = l.real();
        m.mode.im = l.imag();
        m.mode.conjugate_pair = true;
        m.mode.freq_hz = l.imag() / (2.0 * std::numbers::pi);
        m.mode.damping = zeta;
        m.weight = 2.0 * std::abs(cv[i] * wb[i] / l);
        out.push_back(std::move(m));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const ModalWeight& a, const ModalWeight& b) { return a.weight > b.weight; });
    return out;
}

std::optional<ModalWeight> dominant_oscillatory_mode(const StateSpaceModel& ss,
                                                     StepChannel channel) {
    std::vector<ModalWeight> w = modal_step_weights(ss, channel);
    if (w.empty()) return std::nullopt;
    return w.front();
}

std::string scenario_key(const std::string& grid_case, ControlType control, bool sc,
                         const OperatingPoint& op) {
    std::ostringstream os;
    os << grid_case << '/' << to_string(control) << '/' << (sc ? "sc" : "nosc") << "/vg"
       << op.v_g_ref << "_vt" << op.v_turb_ref << "_p" << op.p_turb_ref;
    return os.str();
}

Scenario sweep_scenario(const Scenario& base, const NamedGridCase& grid_case,
                        ControlType control, bool sc, const OperatingPoint& op) {
    Scenario s = base;
    s.name = grid_case.name;
    s.grid_case = grid_case.grid;
    s.grid_impedance.reset();
    s.control = control;
    s.sc.enabled = sc;
    s.op = op;
    return s;
}

StabilityReport analyse(const Scenario& scenario, const std::string& grid_case_name) {
    StabilityReport rep;
    try {
        const EquilibriumPoint eq = solve_operating_point(scenario, scenario.op);
        const StateSpaceModel ss = linearize(scenario, eq);
        rep = classify(eigenvalues(ss));
        rep.residual = eq.residual_norm;
        rep.iterations = eq.iterations;
    } catch (const std::exception& e) {
        rep = StabilityReport{};
        rep.solved = false;
        rep.stable = false;
        rep.failure = e.what();
        rep.max_re = std::numeric_limits<double>::quiet_NaN();
        rep.min_damping_below_100hz = std::numeric_limits<double>::quiet_NaN();
    }
    rep.grid_case = grid_case_name;
    rep.control = scenario.control;
    rep.sc = scenario.sc.enabled;
    rep.op = scenario.op;
    rep.key = scenario_key(grid_case_name, scenario.control, scenario.sc.enabled, scenario.op);
    return rep;
}

std::vector<StabilityReport> sweep(const Scenario& base, const StudySet& study,
                                   const SweepOptions& options) {
    std::vector<Scenario> items;
    std::vector<std::string> names;
    const std::vector<OperatingPoint> ops = study.operating_points();
    for (const NamedGridCase& gc : study.grid_cases) {
        for (ControlType control : options.controls) {
            for (bool sc : options.sc) {
                for (const OperatingPoint& op : ops) {
                    items.push_back(sweep_scenario(base, gc, control, sc, op));
                    names.push_back(gc.name);
                }
            }
        }
    }

    std::vector<StabilityReport> reports(items.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < items.size(); k = next++) {
            reports[k] = analyse(items[k], names[k]);
            if (!options.keep_eigen) {
                reports[k].eigen.clear();
            }
        }
    };
    unsigned jobs = options.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                      : options.jobs;
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, items.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < jobs; ++k) {
        pool.emplace_back(worker);
    }
    worker();
    for (std::thread& t : pool) {
        t.join();
    }
    return reports;
}

}  // namespace wppsc
