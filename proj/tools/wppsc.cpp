// wppsc: command-line front end for the wind-plant stability library.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wppsc/analysis.hpp"
#include "wppsc/csv.hpp"
#include "wppsc/errors.hpp"
#include "wppsc/linearize.hpp"
#include "wppsc/powerflow.hpp"
#include "wppsc/scenario.hpp"
#include "wppsc/scr.hpp"
#include "wppsc/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wppsc;

namespace {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kConfig = 2,
    kNonConvergence = 3,
    kDivergence = 4,
};

struct Common {
    std::string config;
    std::string out = ".";
    unsigned jobs = 0;
    std::vector<std::string> overrides;
    bool verbose = false;
};

struct Loaded {
    Scenario scenario;
    json resolved;
};

void log(const Common& c, const std::string& msg) {
    if (c.verbose) {
        std::cerr << "[wppsc] " << msg << '\n';
    }
}

/// Config file (or a previous manifest), then overrides, then strict parse.
Loaded load(const Common& c) {
    json j = json::object();
    std::string base_dir = ".";
    if (!c.config.empty()) {
        std::ifstream in(c.config);
        if (!in) {
            throw ConfigError("config", "cannot open '" + c.config + "'");
        }
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError("config", e.what());
        }
        if (j.is_object() && j.contains("wppsc_manifest")) {
            j = j.at("config");
        }
        const fs::path dir = fs::path(c.config).parent_path();
        base_dir = dir.empty() ? "." : dir.string();
    }
    for (const std::string& o : c.overrides) {
        apply_override(j, o);
    }
    Loaded l;
    l.scenario = scenario_from_json(j, base_dir);
    l.resolved = to_json(l.scenario);
    return l;
}

fs::path prepare_out(const Common& c) {
    const fs::path out(c.out);
    fs::create_directories(out);
    return out;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    return f;
}

void write_manifest(const fs::path& out, const std::string& command, const Loaded& l,
                    const json& options, const std::vector<std::string>& outputs) {
    json m;
    m["wppsc_manifest"] = 1;
    m["wppsc_version"] = WPPSC_VERSION;
    m["command"] = command;
    m["options"] = options;
    m["outputs"] = outputs;
    m["config"] = l.resolved;
    std::ofstream f = open_out(out / "manifest.json");
    f << m.dump(2) << '\n';
}

std::string join(const std::vector<std::string>& v, char sep) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) s += sep;
        s += v[k];
    }
    return s;
}

void write_eigs(std::ostream& out, const std::vector<StabilityReport>& reports) {
    CsvWriter w(out, {"key", "index", "re", "im", "freq_hz", "damping", "conjugate_pair",
                      "dominant_states"});
    for (const StabilityReport& r : reports) {
        for (std::size_t k = 0; k < r.eigen.size(); ++k) {
            const EigenRecord& e = r.eigen[k];
            w.field(r.key).field(k).field(e.re).field(e.im).field(e.freq_hz).field(e.damping)
                .field(e.conjugate_pair).field(join(e.dominant_states, ';'));
            w.end_row();
        }
    }
}

// ---------------------------------------------------------------------------

int run_steady(const Common& c) {
    const Loaded l = load(c);
    const fs::path out = prepare_out(c);
    log(c, "solving operating point of '" + l.scenario.name + "'");
    const EquilibriumPoint eq = solve_operating_point(l.scenario, l.scenario.op);
    const SystemModel model = make_model(l.scenario, eq);
    const PlantPowers s = model.measure_powers(eq.state);
    const Outputs o = model.outputs(eq.state);

    std::ofstream f = open_out(out / "steady.csv");
    CsvWriter w(f, {"name", "value"});
    const auto& labels = model.layout().labels();
    for (std::size_t k = 0; k < labels.size(); ++k) {
        w.field(labels[k]).field(eq.state[k]);
        w.end_row();
    }
    const std::vector<std::pair<std::string, double>> extra{
        {"phi_sc", eq.phi_sc},   {"q_ref", eq.refs.q},        {"p_pc", s.p_pc},
        {"q_pc", s.q_pc},        {"p_g", s.p_g},              {"q_g", s.q_g},
        {"p_sc", s.p_sc},        {"q_sc", s.q_sc},            {"v_c_mag", o.v_c_mag},
        {"v_pcc_mag", o.v_pcc_mag}, {"residual_norm", eq.residual_norm},
        {"iterations", static_cast<double>(eq.iterations)}};
    for (const auto& [name, value] : extra) {
        w.field(name).field(value);
        w.end_row();
    }
    write_manifest(out, "steady", l, json::object(), {"steady.csv"});
    log(c, "residual " + format_number(eq.residual_norm));
    return kOk;
}

int run_eig(const Common& c, bool dump_a) {
    const Loaded l = load(c);
    const fs::path out = prepare_out(c);
    const EquilibriumPoint eq = solve_operating_point(l.scenario, l.scenario.op);
    const StateSpaceModel ss = linearize(l.scenario, eq);
    StabilityReport rep = classify(eigenvalues(ss));
    rep.key = scenario_key(l.scenario.name, l.scenario.control, l.scenario.sc.enabled,
                           l.scenario.op);
    std::vector<std::string> outputs{"eigs.csv"};
    {
        std::ofstream f = open_out(out / "eigs.csv");
        write_eigs(f, {rep});
    }
    if (dump_a) {
        std::ofstream f = open_out(out / "a_matrix.csv");
        write_matrix_csv(f, ss.a, ss.state_labels, ss.state_labels);
        outputs.push_back("a_matrix.csv");
    }
    write_manifest(out, "eig", l, {{"dump_a", dump_a}}, outputs);
    log(c, std::string(rep.stable ? "stable" : "unstable") + ", max re " +
               format_number(rep.max_re));
    return kOk;
}

struct StepArgs {
    std::string channel = "power";
    double magnitude = 0.1;
    double t_end = 2.0;
    double dt = 1e-4;
};

int run_step(const Common& c, const StepArgs& a) {
    const Loaded l = load(c);
    const fs::path out = prepare_out(c);
    const EquilibriumPoint eq = solve_operating_point(l.scenario, l.scenario.op);
    const StateSpaceModel ss = linearize(l.scenario, eq);
    const StepChannel ch = a.channel == "voltage" ? StepChannel::voltage : StepChannel::power;
    const TimeSeries ts = step_response(ss, ch, a.magnitude, a.t_end, a.dt);
    {
        std::ofstream f = open_out(out / "step.csv");
        write_timeseries_csv(f, ts);
    }
    write_manifest(out, "step", l,
                   {{"channel", a.channel}, {"magnitude", a.magnitude}, {"t_end", a.t_end},
                    {"dt", a.dt}},
                   {"step.csv"});
    if (ts.aborted) {
        std::cerr << "wppsc: step response " << *ts.aborted << '\n';
        return kDivergence;
    }
    return kOk;
}

int run_sweep(const Common& c, bool write_eig) {
    const Loaded l = load(c);
    const fs::path out = prepare_out(c);
    SweepOptions opt;
    opt.jobs = c.jobs;
    opt.keep_eigen = write_eig;
    log(c, "sweeping " + std::to_string(l.scenario.study.grid_cases.size()) + " grid cases x " +
               std::to_string(l.scenario.study.operating_points().size()) + " operating points");
    const std::vector<StabilityReport> reports = sweep(l.scenario, l.scenario.study, opt);

    std::vector<std::string> outputs{"sweep.csv"};
    {
        std::ofstream f = open_out(out / "sweep.csv");
        CsvWriter w(f, {"key", "grid_case", "control", "sc", "v_g_ref", "v_turb_ref",
                        "p_turb_ref", "solved", "stable", "max_re", "min_damping_below_100hz",
                        "poorly_damped_near_sync", "null_modes", "residual", "iterations",
                        "failure"});
        for (const StabilityReport& r : reports) {
            w.field(r.key).field(r.grid_case).field(to_string(r.control)).field(r.sc)
                .field(r.op.v_g_ref).field(r.op.v_turb_ref).field(r.op.p_turb_ref)
                .field(r.solved).field(r.stable).field(r.max_re)
                .field(r.min_damping_below_100hz).field(r.poorly_damped_near_sync)
                .field(r.null_modes).field(r.residual).field(r.iterations).field(r.failure);
            w.end_row();
        }
    }
    if (write_eig) {
        std::ofstream f = open_out(out / "eigs.csv");
        write_eigs(f, reports);
        outputs.push_back("eigs.csv");
    }
    write_manifest(out, "sweep", l, {{"eigs", write_eig}}, outputs);

    std::size_t failed = 0, unstable = 0;
    for (const StabilityReport& r : reports) {
        failed += r.solved ? 0 : 1;
        unstable += (r.solved && !r.stable) ? 1 : 0;
    }
    log(c, std::to_string(reports.size()) + " scenarios, " + std::to_string(unstable) +
               " unstable, " + std::to_string(failed) + " failed");
    return kOk;
}

int run_scr(const Common& c, bool simulate) {
    const Loaded l = load(c);
    const fs::path out = prepare_out(c);
    const std::vector<ScrReport> reports = scr_study(l.scenario, simulate);
    {
        std::ofstream f = open_out(out / "scr.csv");
        CsvWriter w(f, {"case", "scr_o", "scr_sc_theory", "scr_sc_sim", "rel_dev"});
        for (const ScrReport& r : reports) {
            w.field(r.name).field(r.scr_o).field(r.scr_sc_theory);
            if (r.scr_sc_sim) {
                w.field(*r.scr_sc_sim).field(*r.rel_dev);
            } else {
                w.field("").field("");
            }
            w.end_row();
        }
    }
    for (const ScrReport& r : reports) {
        log(c, r.name + ": scr_base " + format_number(r.scr_base) + ", complex-convention ESCR " +
                   format_number(r.scr_sc_theory_complex) +
                   (r.scr_o_sim ? ", measured without SC " + format_number(*r.scr_o_sim) : ""));
    }
    write_manifest(out, "scr", l, {{"simulate", simulate}}, {"scr.csv"});
    return kOk;
}

struct FaultArgs {
    std::string bus = "wt_mv";
    double r_fault = 1e-4;
    double t_on = 0.1;
    double duration = 0.15;
    std::size_t record_every = 1;
};

int run_fault(const Common& c, const FaultArgs& a) {
    Loaded l = load(c);
    const fs::path out = prepare_out(c);
    Scenario& s = l.scenario;
    if (s.events.empty()) {
        Event on;
        on.t = a.t_on;
        on.kind = Event::Kind::fault_on;
        on.bus = a.bus == "pcc" ? Bus::pcc : Bus::wt_mv;
        on.r_fault = a.r_fault;
        Event off = on;
        off.t = a.t_on + a.duration;
        off.kind = Event::Kind::fault_off;
        s.events = {on, off};
        s.validate();
        l.resolved = to_json(s);
    }
    const EquilibriumPoint eq = solve_operating_point(s, s.op);
    SimOptions opt;
    opt.record_every = a.record_every;
    const SimResult r = simulate(s, eq, opt);
    {
        std::ofstream f = open_out(out / "fault.csv");
        write_timeseries_csv(f, r.series);
    }
    write_manifest(out, "fault", l, {{"record_every", a.record_every}}, {"fault.csv"});
    if (r.diverged()) {
        std::cerr << "wppsc: simulation " << *r.series.aborted << '\n';
        return kDivergence;
    }
    return kOk;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("-c,--config", c.config, "Scenario config (JSON) or a previous manifest.json");
    sub->add_option("-o,--out", c.out, "Output directory")->capture_default_str();
    sub->add_option("-j,--jobs", c.jobs, "Worker threads for batch runs (0: all cores)");
    sub->add_option("--set", c.overrides, "Override a config key, e.g. --set grid.scr=2.0")
        ->allow_extra_args(false);
    sub->add_flag("-v,--verbose", c.verbose, "Progress and diagnostics on stderr");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Offshore wind plant small-signal stability and SCR toolkit"};
    app.set_version_flag("--version", std::string(WPPSC_VERSION));
    app.require_subcommand(1);

    Common common;
    bool dump_a = false;
    bool sweep_eigs = false;
    bool no_sim = false;
    StepArgs step;
    FaultArgs fault;

    CLI::App* steady = app.add_subcommand("steady", "Solve the operating point -> steady.csv");
    add_common(steady, common);

    CLI::App* eig = app.add_subcommand("eig", "Eigenvalues at the operating point -> eigs.csv");
    add_common(eig, common);
    eig->add_flag("--dump-a", dump_a, "Also write the labeled state matrix to a_matrix.csv");

    CLI::App* stp = app.add_subcommand("step", "Linear reference-step response -> step.csv");
    add_common(stp, common);
    stp->add_option("--channel", step.channel, "power or voltage")
        ->check(CLI::IsMember({"power", "voltage"}))->capture_default_str();
    stp->add_option("--magnitude", step.magnitude, "Step size, pu")->capture_default_str();
    stp->add_option("--t-end", step.t_end, "Duration, s")->capture_default_str();
    stp->add_option("--dt", step.dt, "Integration step, s")->capture_default_str();

    CLI::App* swp = app.add_subcommand("sweep", "Grid cases x operating points x controls x SC -> sweep.csv");
    add_common(swp, common);
    swp->add_flag("--eigs", sweep_eigs, "Also write every spectrum to eigs.csv");

    CLI::App* scr = app.add_subcommand("scr", "SCR with and without the SC -> scr.csv");
    add_common(scr, common);
    scr->add_flag("--no-sim", no_sim, "Closed form only; skip the fault simulations");

    CLI::App* flt = app.add_subcommand("fault", "Nonlinear time-domain run -> fault.csv");
    add_common(flt, common);
    flt->add_option("--bus", fault.bus, "Fault bus when the config has no events (pcc, wt_mv)")
        ->check(CLI::IsMember({"pcc", "wt_mv"}))->capture_default_str();
    flt->add_option("--r-fault", fault.r_fault, "Fault resistance, pu")->capture_default_str();
    flt->add_option("--t-on", fault.t_on, "Fault inception, s")->capture_default_str();
    flt->add_option("--duration", fault.duration, "Fault duration, s")->capture_default_str();
    flt->add_option("--record-every", fault.record_every, "Keep one sample every N steps")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*steady) return run_steady(common);
        if (*eig) return run_eig(common, dump_a);
        if (*stp) return run_step(common, step);
        if (*swp) return run_sweep(common, sweep_eigs);
        if (*scr) return run_scr(common, !no_sim);
        if (*flt) return run_fault(common, fault);
    } catch (const ConfigError& e) {
        std::cerr << "wppsc: config error: " << e.what() << '\n';
        return kConfig;
    } catch (const NonConvergence& e) {
        std::cerr << "wppsc: " << e.what() << '\n';
        return kNonConvergence;
    } catch (const Infeasible& e) {
        std::cerr << "wppsc: " << e.what() << '\n';
        return kNonConvergence;
    } catch (const std::exception& e) {
        std::cerr << "wppsc: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}
