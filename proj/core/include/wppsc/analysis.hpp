#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wppsc/linearize.hpp"
#include "wppsc/scenario.hpp"
#include "wppsc/timeseries.hpp"

namespace wppsc {

/// One eigenvalue; a complex-conjugate pair is reported once with im > 0.
struct EigenRecord {
    double re = 0.0;
    double im = 0.0;
    double damping = 1.0;  ///< NaN for a null mode
    double freq_hz = 0.0;
    bool conjugate_pair = false;
    std::vector<std::string> dominant_states;

    double magnitude() const { return std::hypot(re, im); }
};

inline constexpr double kNullModeMagnitude = 1e-8;
inline constexpr double kStabilityTolerance = 1e-6;
inline constexpr double kWellDampedRatio = 0.20;

/// zeta = -Re(lambda)/|lambda|; nullopt for lambda = 0.
std::optional<double> damping(std::complex<double> lambda);

/// All n eigenvalues of A, conjugates included. Throws EigenSolverFailure.
std::vector<std::complex<double>> spectrum(const Eigen::MatrixXd& a);

/// Eigenvalues with damping and participation-based dominant states.
std::vector<EigenRecord> eigenvalues(const StateSpaceModel& ss);

struct StabilityReport {
    std::string key;
    std::string grid_case;
    ControlType control = ControlType::gfl;
    bool sc = false;
    OperatingPoint op;

    bool solved = false;
    std::string failure;
    bool stable = false;
    double max_re = 0.0;
    double min_damping_below_100hz = 1.0;
    int poorly_damped_near_sync = 0;
    int null_modes = 0;
    double residual = 0.0;
    int iterations = 0;
    std::vector<EigenRecord> eigen;
};

/// Stable iff every non-null mode has re < tol. Near-synchronous modes
/// (40-60 Hz) with damping below 20 % are counted as poorly damped.
StabilityReport classify(const std::vector<EigenRecord>& records,
                         double tol = kStabilityTolerance);

bool is_poorly_damped_near_synchronous(const EigenRecord& r);

enum class StepChannel { power, voltage };

/// Linear response y(t) - y(0) to a reference step, fixed-step RK4 on
/// x' = A x + B u. Columns: every output of `ss`. Stops when |x| > 1e6.
TimeSeries step_response(const StateSpaceModel& ss, StepChannel channel, double magnitude,
                         double t_end, double dt);

/// Input index addressed by a step channel.
std::size_t step_input_index(const StateSpaceModel& ss, StepChannel channel);
/// Output label monitored for a step channel.
std::string step_output_label(StepChannel channel);

/// Contribution of one oscillatory pair to a step response.
struct ModalWeight {
    EigenRecord mode;
    /// 2 |(C v)(w B) / lambda|: final-value amplitude of the pair's term in
    /// the monitored output after a unit step on the channel's input.
    double weight = 0.0;
};

inline constexpr double kOscillatoryDampingLimit = 0.99;

/// Step weights of every conjugate pair with damping below 0.99, largest first.
/// Near-critically damped pairs are skipped: their residues are ill-conditioned
/// and cancel against each other.
std::vector<ModalWeight> modal_step_weights(const StateSpaceModel& ss, StepChannel channel);

/// Pair with the largest step weight, or nullopt when there is none.
std::optional<ModalWeight> dominant_oscillatory_mode(const StateSpaceModel& ss,
                                                     StepChannel channel);

struct SweepOptions {
    std::vector<ControlType> controls{ControlType::gfl, ControlType::gfm};
    std::vector<bool> sc{false, true};
    unsigned jobs = 0;  ///< 0: hardware concurrency
    bool keep_eigen = true;
};

std::string scenario_key(const std::string& grid_case, ControlType control, bool sc,
                         const OperatingPoint& op);

/// Scenario of one sweep item: `base` with the grid case, control, SC flag and op applied.
Scenario sweep_scenario(const Scenario& base, const NamedGridCase& grid_case,
                        ControlType control, bool sc, const OperatingPoint& op);

/// Solve, linearize and classify one scenario; failures are recorded, not thrown.
StabilityReport analyse(const Scenario& scenario, const std::string& grid_case_name);

/// grid cases x ops x controls x SC; ordered by (case, control, sc, op).
std::vector<StabilityReport> sweep(const Scenario& base, const StudySet& study,
                                   const SweepOptions& options = {});

}  // namespace wppsc
