#pragma once

#include <span>
#include <string>
#include <vector>

#include "wppsc/model.hpp"
#include "wppsc/powerflow.hpp"
#include "wppsc/timeseries.hpp"

namespace wppsc {

inline constexpr double kDivergenceThreshold = 1e6;

/// Classical fixed-step RK4 for x' = f(x) with reusable stage buffers.
class Rk4 {
public:
    explicit Rk4(std::size_t n) : k1_(n), k2_(n), k3_(n), k4_(n), tmp_(n) {}

    /// Writes x(t + dt) into `out`, which must not alias `x`.
    /// `f(x, dx)` evaluates the derivative.
    template <class F>
    void step(F&& f, std::span<const double> x, double dt, std::span<double> out) {
        const std::size_t n = x.size();
        f(x, std::span<double>(k1_));
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * dt * k1_[i];
        f(std::span<const double>(tmp_), std::span<double>(k2_));
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * dt * k2_[i];
        f(std::span<const double>(tmp_), std::span<double>(k3_));
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + dt * k3_[i];
        f(std::span<const double>(tmp_), std::span<double>(k4_));
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = x[i] + dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
        }
    }

private:
    std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

struct SimOptions {
    /// Keep one sample in `record_every` steps; the first and last step are always kept.
    std::size_t record_every = 1;
    /// Faulted nodes whose time constant C*r_fault is below this many steps
    /// are solved algebraically.
    double algebraic_steps = 5.0;
    /// Include every state as a column in addition to the derived signals.
    bool record_states = true;
};

struct SimResult {
    TimeSeries series;
    /// State at the last completed step (the last finite state on abort).
    std::vector<double> final_state;
    double final_time = 0.0;
    bool diverged() const { return series.aborted.has_value(); }
};

/// Names of the derived signals captured after the state columns.
std::vector<std::string> derived_signal_names();

/// Fixed-step RK4 on the model's ODE. Events are snapped to the nearest step
/// boundary and applied before that step. Stops early, with `series.aborted`
/// set, when a state exceeds 1e6 in magnitude or turns non-finite.
SimResult integrate(SystemModel model, std::vector<double> x0, double t_end, double dt,
                    std::vector<Event> events, const SimOptions& options = {});

/// Integrate a scenario from a solved equilibrium using its sim settings and events.
SimResult simulate(const Scenario& scenario, const EquilibriumPoint& eq,
                   const SimOptions& options = {});

}  // namespace wppsc
