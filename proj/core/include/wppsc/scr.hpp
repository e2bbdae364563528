#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "wppsc/scenario.hpp"
#include "wppsc/timeseries.hpp"

namespace wppsc {

/// Branch impedance magnitudes seen from the turbine MV terminal.
struct ScrInputs {
    double z_g = 0.0;
    std::optional<double> z_sc;  ///< absent when the SC is disabled
    double z_atf = 0.0;
};

/// 1/z_g.
double scr_base(double z_g);

/// 1/(z_g + z_atf).
double scr_wt(double z_g, double z_atf);

/// 1/(z_g || z_sc + z_atf); falls back to scr_wt without an SC.
double escr_with_sc(const ScrInputs& in);

/// (z_g + z_sc)/(z_g z_sc + z_atf (z_g + z_sc)); same value as escr_with_sc.
double escr_rational(const ScrInputs& in);

/// Magnitudes of the scenario's grid, SC and collector impedances.
ScrInputs scr_inputs(const Scenario& scenario);

/// ESCR with complex impedances combined before taking the magnitude.
double escr_complex(const Scenario& scenario);

/// Reference SCR levels of the three grid cases at the turbine MV terminal.
struct Table3Row {
    std::string name;
    double scr_o;
    double scr_sc_theory;
    double scr_sc_sim;
};
const std::array<Table3Row, 3>& table3();

struct Table3Fit {
    double z_sc = 0.0;
    double z_atf = 0.0;
    std::array<double, 3> z_g{};
    std::array<double, 3> scr_o{};       ///< fitted SCR without SC
    std::array<double, 3> scr_sc{};      ///< fitted ESCR with SC
    std::array<double, 3> residual_o{};  ///< relative, (fit - target)/target
    std::array<double, 3> residual_sc{};
    double cost = 0.0;  ///< sum of squared relative residuals
    /// Set when any relative residual exceeds 10 %.
    bool flagged = false;
};

/// Least-squares fit of shared (z_sc, z_atf >= 0) and per-case z_g to the
/// reference SCR levels. Each z_g absorbs its no-SC row exactly.
Table3Fit fit_to_table3();

/// Residuals of a given (z_sc, z_atf) against the reference levels.
Table3Fit evaluate_table3(double z_sc, double z_atf);

struct FaultMeasurementOptions {
    double r_fault = 1e-4;
    double window = 0.5;   ///< fault duration, s
    double average = 0.02; ///< averaging window at the end of the fault, s
    double drift_tolerance = 0.01;
    std::optional<double> dt;  ///< defaults to the scenario's step
    bool keep_series = false;
};

struct FaultMeasurement {
    double scr = 0.0;
    double v_prefault = 0.0;
    double i_fault = 0.0;
    /// Relative change of the averaged fault current between the last two windows.
    double drift = 0.0;
    std::optional<TimeSeries> series;
};

/// Opens the converter, settles the passive network, applies a bolted fault
/// at `bus` and returns V_prefault * |i_fault| with the fault current phasor
/// averaged over the final window. Throws MeasurementInvalid when unsettled.
FaultMeasurement measure_scr_from_fault(const Scenario& scenario, Bus bus = Bus::wt_mv,
                                        const FaultMeasurementOptions& options = {});

struct ScrReport {
    std::string name;
    double scr_base = 0.0;
    double scr_o = 0.0;
    double scr_sc_theory = 0.0;
    double scr_sc_theory_complex = 0.0;
    std::optional<double> scr_o_sim;
    std::optional<double> scr_sc_sim;
    std::optional<double> rel_dev;  ///< |theory - sim|/theory with SC
};

/// Closed-form levels for `scenario` with the SC enabled; measured levels
/// with and without the SC when `simulate` is set.
ScrReport scr_report(const Scenario& scenario, const std::string& name, bool simulate,
                     const FaultMeasurementOptions& options = {});

/// One report per grid case of the scenario's study set.
std::vector<ScrReport> scr_study(const Scenario& base, bool simulate,
                                 const FaultMeasurementOptions& options = {});

}  // namespace wppsc
