#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wppsc/components.hpp"
#include "wppsc/netbase.hpp"

namespace wppsc {

/// Operating-point references: grid source voltage, turbine voltage, turbine power.
struct OperatingPoint {
    double v_g_ref = 1.0;
    double v_turb_ref = 1.0;
    double p_turb_ref = 1.0;
};

enum class Bus { pcc, wt_mv };

/// Reference channel addressed by step events and linearization inputs.
enum class RefChannel { p, v_g, v_turb, q };

struct Event {
    enum class Kind { fault_on, fault_off, step_ref };
    double t = 0.0;
    Kind kind = Kind::step_ref;
    Bus bus = Bus::wt_mv;
    double r_fault = 1e-4;
    RefChannel channel = RefChannel::p;
    double delta = 0.0;
};

struct SimSettings {
    double dt = 50e-6;
    double t_end = 2.0;
};

struct NamedGridCase {
    std::string name;
    GridCase grid;
};

/// Batch definition used by the sweep and scr subcommands.
struct StudySet {
    std::vector<NamedGridCase> grid_cases;
    std::vector<double> v_g_ref;
    std::vector<double> v_turb_ref;
    std::vector<double> p_turb_ref;

    std::vector<OperatingPoint> operating_points() const;
};

/// Grid strength cases at the WT MV terminal.
StudySet table1_table2_study();

struct Scenario {
    std::string name = "scenario";
    double frequency_hz = kNominalFrequencyHz;

    /// Either a grid case (SCR and X/R at the WT MV terminal, the collector
    /// impedance is subtracted) or an explicit grid impedance.
    std::optional<GridCase> grid_case = GridCase{1.6, 5.0};
    std::optional<Impedance> grid_impedance;

    ScParams sc;
    ControlType control = ControlType::gfl;
    GflParams gfl;
    GfmParams gfm;
    FilterCableParams network;
    OperatingPoint op;
    SimSettings sim;
    std::vector<Event> events;
    StudySet study = table1_table2_study();

    double omega0() const;
    /// Grid Thevenin impedance behind the PCC.
    Impedance grid_z() const;
    GridParams grid_params() const;

    /// Throws ConfigError naming the first offending key.
    void validate() const;
};

/// Defaults: weak grid, GFL, SC disabled, fitted SC impedance.
Scenario default_scenario();

std::string to_string(ControlType c);
std::string to_string(QChannelMode m);
std::string to_string(Bus b);
std::string to_string(RefChannel c);

nlohmann::json to_json(const Scenario& s);

/// Strict parse: unknown keys are rejected. `base_dir` resolves string
/// references such as `"study": {"ops": "table2_ops.json"}`.
Scenario scenario_from_json(const nlohmann::json& j, const std::string& base_dir = ".");

Scenario load_scenario(const std::string& path);

/// Apply `a.b.c=value` overrides; the value is parsed as JSON when possible.
void apply_override(nlohmann::json& config, const std::string& assignment);

}  // namespace wppsc
