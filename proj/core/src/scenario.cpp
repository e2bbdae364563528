#include "wppsc/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "wppsc/errors.hpp"

namespace wppsc {

using nlohmann::json;

std::vector<OperatingPoint> StudySet::operating_points() const {
    std::vector<OperatingPoint> ops;
    ops.reserve(v_g_ref.size() * v_turb_ref.size() * p_turb_ref.size());
    for (double vg : v_g_ref) {
        for (double vt : v_turb_ref) {
            for (double p : p_turb_ref) {
                ops.push_back({vg, vt, p});
            }
        }
    }
    return ops;
}

StudySet table1_table2_study() {
    StudySet s;
    s.grid_cases = {{"weak", {1.6, 5.0}}, {"normal", {3.2, 14.8}}, {"strong", {4.12, 14.8}}};
    s.v_g_ref = {0.92, 1.0, 1.08};
    s.v_turb_ref = {0.92, 1.0, 1.08};
    s.p_turb_ref = {0.1, 0.5, 1.0};
    return s;
}

double Scenario::omega0() const { return 2.0 * std::numbers::pi * frequency_hz; }

Impedance Scenario::grid_z() const {
    if (grid_impedance) {
        return *grid_impedance;
    }
    return impedance_from_scr_xr(*grid_case) - network.atf_impedance(omega0());
}

GridParams Scenario::grid_params() const {
    const Impedance z = grid_z();
    return GridParams{z.r, z.x, op.v_g_ref, 0.0};
}

Scenario default_scenario() { return Scenario{}; }

std::string to_string(ControlType c) { return c == ControlType::gfl ? "gfl" : "gfm"; }
std::string to_string(QChannelMode m) {
    return m == QChannelMode::reactive ? "reactive" : "voltage";
}
std::string to_string(Bus b) { return b == Bus::pcc ? "pcc" : "wt_mv"; }
std::string to_string(RefChannel c) {
    switch (c) {
        case RefChannel::p: return "p";
        case RefChannel::v_g: return "v_g";
        case RefChannel::v_turb: return "v_turb";
        case RefChannel::q: return "q";
    }
    return "?";
}

namespace {

void require(bool ok, const std::string& key, const std::string& message) {
    if (!ok) {
        throw ConfigError(key, message);
    }
}

void require_range(double v, double lo, double hi, const std::string& key) {
    require(std::isfinite(v) && v >= lo && v <= hi, key,
            "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

void require_positive(double v, const std::string& key) {
    require(std::isfinite(v) && v > 0.0, key, "must be positive");
}

void require_nonnegative(double v, const std::string& key) {
    require(std::isfinite(v) && v >= 0.0, key, "must be non-negative");
}

const char* event_kind_name(Event::Kind k) {
    switch (k) {
        case Event::Kind::fault_on: return "fault_on";
        case Event::Kind::fault_off: return "fault_off";
        case Event::Kind::step_ref: return "step_ref";
    }
    return "?";
}

}  // namespace

void Scenario::validate() const {
    require_positive(frequency_hz, "frequency_hz");

    require(grid_case.has_value() != grid_impedance.has_value(), "grid",
            "give either {scr, x_r} or {r, x}");
    if (grid_case) {
        require_positive(grid_case->scr, "grid.scr");
        require_nonnegative(grid_case->x_r, "grid.x_r");
    } else {
        require_nonnegative(grid_impedance->r, "grid.r");
        require_positive(grid_impedance->x, "grid.x");
    }

    require_positive(network.lf, "network.lf");
    require_positive(network.cf, "network.cf");
    require_nonnegative(network.rf, "network.rf");
    require_nonnegative(network.ra, "network.ra");
    require_nonnegative(network.rtf, "network.rtf");
    require_nonnegative(network.la, "network.la");
    require_nonnegative(network.ltf, "network.ltf");
    require_positive(network.la + network.ltf, "network.ltf");
    require_positive(network.c_pcc, "network.c_pcc");

    if (grid_case) {
        const Impedance z = grid_z();
        require(z.r >= 0.0 && z.x > 0.0, "grid.scr",
                "grid case impedance is smaller than the array cable + transformer impedance");
    }

    if (sc.enabled) {
        require_positive(sc.x_sub, "sc.x_sub");
        require_nonnegative(sc.r_tr, "sc.r_tr");
        require_nonnegative(sc.x_tr, "sc.x_tr");
        require_positive(sc.emf, "sc.emf");
    }

    require_nonnegative(gfl.kp_pll, "control.gfl.kp_pll");
    require_nonnegative(gfl.ki_pll, "control.gfl.ki_pll");
    require_positive(gfl.kp_pc, "control.gfl.kp_pc");
    require_nonnegative(gfl.ki_pc, "control.gfl.ki_pc");
    require_nonnegative(gfl.kp_cc, "control.gfl.kp_cc");
    require_nonnegative(gfl.ki_cc, "control.gfl.ki_cc");

    require_positive(gfm.j_vsm, "control.gfm.j_vsm");
    require_nonnegative(gfm.d_p, "control.gfm.d_p");
    require_nonnegative(gfm.kp_v, "control.gfm.kp_v");
    require_nonnegative(gfm.ki_v, "control.gfm.ki_v");
    require_nonnegative(gfm.kp_c, "control.gfm.kp_c");
    require_nonnegative(gfm.ki_c, "control.gfm.ki_c");

    require_range(op.v_g_ref, 0.8, 1.2, "op.v_g_ref");
    require_range(op.v_turb_ref, 0.8, 1.2, "op.v_turb_ref");
    require_range(op.p_turb_ref, 0.0, 1.2, "op.p_turb_ref");

    require_range(sim.dt, 1e-6, 1e-3, "sim.dt");
    require_positive(sim.t_end, "sim.t_end");

    double last_t = 0.0;
    std::set<Bus> faulted;
    for (std::size_t k = 0; k < events.size(); ++k) {
        const Event& ev = events[k];
        const std::string key = "events[" + std::to_string(k) + "]";
        require(std::isfinite(ev.t) && ev.t >= 0.0, key + ".t", "must be non-negative");
        require(ev.t >= last_t, key + ".t", "events must be sorted by time");
        last_t = ev.t;
        if (ev.kind == Event::Kind::fault_on) {
            require_positive(ev.r_fault, key + ".r_fault");
            require(!faulted.contains(ev.bus), key, "bus already faulted");
            faulted.insert(ev.bus);
        } else if (ev.kind == Event::Kind::fault_off) {
            require(faulted.contains(ev.bus), key, "fault_off without matching fault_on");
            faulted.erase(ev.bus);
        } else {
            require(std::isfinite(ev.delta), key + ".delta", "must be finite");
        }
    }

    require(!study.grid_cases.empty(), "study.grid_cases", "must not be empty");
    for (std::size_t k = 0; k < study.grid_cases.size(); ++k) {
        const std::string key = "study.grid_cases[" + std::to_string(k) + "]";
        require_positive(study.grid_cases[k].grid.scr, key + ".scr");
        require_nonnegative(study.grid_cases[k].grid.x_r, key + ".x_r");
    }
    for (double v : study.v_g_ref) require_range(v, 0.8, 1.2, "study.ops.v_g_ref");
    for (double v : study.v_turb_ref) require_range(v, 0.8, 1.2, "study.ops.v_turb_ref");
    for (double v : study.p_turb_ref) require_range(v, 0.0, 1.2, "study.ops.p_turb_ref");
}

// ---------------------------------------------------------------------------
// JSON

json to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["frequency_hz"] = s.frequency_hz;
    if (s.grid_case) {
        j["grid"] = {{"scr", s.grid_case->scr}, {"x_r", s.grid_case->x_r}};
    } else {
        j["grid"] = {{"r", s.grid_impedance->r}, {"x", s.grid_impedance->x}};
    }
    j["sc"] = {{"enabled", s.sc.enabled}, {"x_sub", s.sc.x_sub}, {"r_tr", s.sc.r_tr},
               {"x_tr", s.sc.x_tr},       {"emf", s.sc.emf}};
    j["control"] = {
        {"type", to_string(s.control)},
        {"gfl",
         {{"kp_pll", s.gfl.kp_pll},
          {"ki_pll", s.gfl.ki_pll},
          {"kp_pc", s.gfl.kp_pc},
          {"ki_pc", s.gfl.ki_pc},
          {"kp_cc", s.gfl.kp_cc},
          {"ki_cc", s.gfl.ki_cc},
          {"q_mode", to_string(s.gfl.q_mode)}}},
        {"gfm",
         {{"j_vsm", s.gfm.j_vsm},
          {"d_p", s.gfm.d_p},
          {"kp_v", s.gfm.kp_v},
          {"ki_v", s.gfm.ki_v},
          {"kp_c", s.gfm.kp_c},
          {"ki_c", s.gfm.ki_c}}}};
    const FilterCableParams& n = s.network;
    j["network"] = {{"rf", n.rf},   {"lf", n.lf},   {"cf", n.cf},   {"ra", n.ra},
                    {"la", n.la},   {"rtf", n.rtf}, {"ltf", n.ltf}, {"c_pcc", n.c_pcc}};
    j["op"] = {{"v_g_ref", s.op.v_g_ref},
               {"v_turb_ref", s.op.v_turb_ref},
               {"p_turb_ref", s.op.p_turb_ref}};
    j["sim"] = {{"dt", s.sim.dt}, {"t_end", s.sim.t_end}};
    json events = json::array();
    for (const Event& ev : s.events) {
        json e = {{"t", ev.t}, {"kind", event_kind_name(ev.kind)}};
        if (ev.kind == Event::Kind::step_ref) {
            e["channel"] = to_string(ev.channel);
            e["delta"] = ev.delta;
        } else {
            e["bus"] = to_string(ev.bus);
            if (ev.kind == Event::Kind::fault_on) {
                e["r_fault"] = ev.r_fault;
            }
        }
        events.push_back(e);
    }
    j["events"] = events;
    json cases = json::array();
    for (const NamedGridCase& c : s.study.grid_cases) {
        cases.push_back({{"name", c.name}, {"scr", c.grid.scr}, {"x_r", c.grid.x_r}});
    }
    j["study"] = {{"grid_cases", cases},
                  {"ops",
                   {{"v_g_ref", s.study.v_g_ref},
                    {"v_turb_ref", s.study.v_turb_ref},
                    {"p_turb_ref", s.study.p_turb_ref}}}};
    return j;
}

namespace {

/// Strict object reader: every key must be consumed.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        require(j.is_object(), path_.empty() ? "<root>" : path_, "expected an object");
    }
    ~ObjectReader() = default;

    std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
    bool has(const std::string& k) const { return j_.contains(k); }

    const json& at(const std::string& k) {
        seen_.insert(k);
        return j_.at(k);
    }

    void number(const std::string& k, double& out) {
        if (!has(k)) return;
        const json& v = at(k);
        require(v.is_number(), key(k), "expected a number");
        out = v.get<double>();
    }

    void boolean(const std::string& k, bool& out) {
        if (!has(k)) return;
        const json& v = at(k);
        require(v.is_boolean(), key(k), "expected true/false");
        out = v.get<bool>();
    }

    void string(const std::string& k, std::string& out) {
        if (!has(k)) return;
        const json& v = at(k);
        require(v.is_string(), key(k), "expected a string");
        out = v.get<std::string>();
    }

    void numbers(const std::string& k, std::vector<double>& out) {
        if (!has(k)) return;
        const json& v = at(k);
        require(v.is_array(), key(k), "expected an array of numbers");
        out.clear();
        for (const json& e : v) {
            require(e.is_number(), key(k), "expected an array of numbers");
            out.push_back(e.get<double>());
        }
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            require(seen_.contains(it.key()), key(it.key()), "unknown key");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

Bus parse_bus(const std::string& s, const std::string& key) {
    if (s == "pcc") return Bus::pcc;
    if (s == "wt_mv") return Bus::wt_mv;
    throw ConfigError(key, "unknown bus '" + s + "' (expected pcc or wt_mv)");
}

RefChannel parse_channel(const std::string& s, const std::string& key) {
    if (s == "p") return RefChannel::p;
    if (s == "v_g") return RefChannel::v_g;
    if (s == "v_turb") return RefChannel::v_turb;
    if (s == "q") return RefChannel::q;
    throw ConfigError(key, "unknown channel '" + s + "'");
}

json load_json_file(const std::string& path, const std::string& key) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(key, "cannot open '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(key, std::string("parse error in '") + path + "': " + e.what());
    }
}

void read_ops(const json& j, const std::string& path, StudySet& study) {
    ObjectReader r(j, path);
    r.numbers("v_g_ref", study.v_g_ref);
    r.numbers("v_turb_ref", study.v_turb_ref);
    r.numbers("p_turb_ref", study.p_turb_ref);
    r.finish();
}

}  // namespace

Scenario scenario_from_json(const json& j, const std::string& base_dir) {
    Scenario s = default_scenario();
    ObjectReader root(j, "");
    root.string("name", s.name);
    root.number("frequency_hz", s.frequency_hz);

    if (root.has("grid")) {
        ObjectReader g(root.at("grid"), "grid");
        if (g.has("r") || g.has("x")) {
            Impedance z{0.0, 0.0};
            g.number("r", z.r);
            g.number("x", z.x);
            s.grid_impedance = z;
            s.grid_case.reset();
            require(!g.has("scr") && !g.has("x_r"), "grid", "give either {scr, x_r} or {r, x}");
        } else {
            GridCase gc = s.grid_case.value_or(GridCase{});
            g.number("scr", gc.scr);
            g.number("x_r", gc.x_r);
            s.grid_case = gc;
        }
        g.finish();
    }

    if (root.has("sc")) {
        ObjectReader r(root.at("sc"), "sc");
        r.boolean("enabled", s.sc.enabled);
        r.number("x_sub", s.sc.x_sub);
        r.number("r_tr", s.sc.r_tr);
        r.number("x_tr", s.sc.x_tr);
        r.number("emf", s.sc.emf);
        r.finish();
    }

    if (root.has("control")) {
        ObjectReader c(root.at("control"), "control");
        std::string type = to_string(s.control);
        c.string("type", type);
        if (type == "gfl") {
            s.control = ControlType::gfl;
        } else if (type == "gfm") {
            s.control = ControlType::gfm;
        } else {
            throw ConfigError("control.type", "expected gfl or gfm");
        }
        if (c.has("gfl")) {
            ObjectReader r(c.at("gfl"), "control.gfl");
            r.number("kp_pll", s.gfl.kp_pll);
            r.number("ki_pll", s.gfl.ki_pll);
            r.number("kp_pc", s.gfl.kp_pc);
            r.number("ki_pc", s.gfl.ki_pc);
            r.number("kp_cc", s.gfl.kp_cc);
            r.number("ki_cc", s.gfl.ki_cc);
            std::string mode = to_string(s.gfl.q_mode);
            r.string("q_mode", mode);
            if (mode == "reactive") {
                s.gfl.q_mode = QChannelMode::reactive;
            } else if (mode == "voltage") {
                s.gfl.q_mode = QChannelMode::voltage;
            } else {
                throw ConfigError("control.gfl.q_mode", "expected reactive or voltage");
            }
            r.finish();
        }
        if (c.has("gfm")) {
            ObjectReader r(c.at("gfm"), "control.gfm");
            r.number("j_vsm", s.gfm.j_vsm);
            r.number("d_p", s.gfm.d_p);
            r.number("kp_v", s.gfm.kp_v);
            r.number("ki_v", s.gfm.ki_v);
            r.number("kp_c", s.gfm.kp_c);
            r.number("ki_c", s.gfm.ki_c);
            r.finish();
        }
        c.finish();
    }

    if (root.has("network")) {
        ObjectReader r(root.at("network"), "network");
        FilterCableParams& n = s.network;
        r.number("rf", n.rf);
        r.number("lf", n.lf);
        r.number("cf", n.cf);
        r.number("ra", n.ra);
        r.number("la", n.la);
        r.number("rtf", n.rtf);
        r.number("ltf", n.ltf);
        r.number("c_pcc", n.c_pcc);
        r.finish();
    }

    if (root.has("op")) {
        ObjectReader r(root.at("op"), "op");
        r.number("v_g_ref", s.op.v_g_ref);
        r.number("v_turb_ref", s.op.v_turb_ref);
        r.number("p_turb_ref", s.op.p_turb_ref);
        r.finish();
    }

    if (root.has("sim")) {
        ObjectReader r(root.at("sim"), "sim");
        r.number("dt", s.sim.dt);
        r.number("t_end", s.sim.t_end);
        r.finish();
    }

    if (root.has("events")) {
        const json& arr = root.at("events");
        require(arr.is_array(), "events", "expected an array");
        s.events.clear();
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string path = "events[" + std::to_string(k) + "]";
            ObjectReader r(arr[k], path);
            Event ev;
            r.number("t", ev.t);
            std::string kind;
            r.string("kind", kind);
            std::string bus = "wt_mv";
            std::string channel = "p";
            if (kind == "fault_on") {
                ev.kind = Event::Kind::fault_on;
                r.string("bus", bus);
                r.number("r_fault", ev.r_fault);
            } else if (kind == "fault_off") {
                ev.kind = Event::Kind::fault_off;
                r.string("bus", bus);
            } else if (kind == "step_ref") {
                ev.kind = Event::Kind::step_ref;
                r.string("channel", channel);
                r.number("delta", ev.delta);
            } else {
                throw ConfigError(path + ".kind", "expected fault_on, fault_off or step_ref");
            }
            ev.bus = parse_bus(bus, path + ".bus");
            ev.channel = parse_channel(channel, path + ".channel");
            r.finish();
            s.events.push_back(ev);
        }
    }

    if (root.has("study")) {
        ObjectReader r(root.at("study"), "study");
        if (r.has("grid_cases")) {
            const json& arr = r.at("grid_cases");
            require(arr.is_array(), "study.grid_cases", "expected an array");
            s.study.grid_cases.clear();
            for (std::size_t k = 0; k < arr.size(); ++k) {
                const std::string path = "study.grid_cases[" + std::to_string(k) + "]";
                ObjectReader c(arr[k], path);
                NamedGridCase gc{"case" + std::to_string(k), {}};
                c.string("name", gc.name);
                c.number("scr", gc.grid.scr);
                c.number("x_r", gc.grid.x_r);
                c.finish();
                s.study.grid_cases.push_back(gc);
            }
        }
        if (r.has("ops")) {
            const json& ops = r.at("ops");
            if (ops.is_string()) {
                const std::filesystem::path p =
                    std::filesystem::path(base_dir) / ops.get<std::string>();
                read_ops(load_json_file(p.string(), "study.ops"), "study.ops", s.study);
            } else {
                read_ops(ops, "study.ops", s.study);
            }
        }
        r.finish();
    }

    root.finish();
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    const json j = load_json_file(path, "config");
    const auto dir = std::filesystem::path(path).parent_path();
    return scenario_from_json(j, dir.empty() ? "." : dir.string());
}

void apply_override(json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError(assignment, "override must look like key=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }

    json* node = &config;
    std::stringstream path(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(path, part, '.')) {
        parts.push_back(part);
    }
    for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
        json& next = (*node)[parts[k]];
        if (next.is_null()) {
            next = json::object();
        }
        require(next.is_object(), key, "cannot descend into a non-object");
        node = &next;
    }
    (*node)[parts.back()] = value;
}

}  // namespace wppsc
