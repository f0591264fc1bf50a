#include "safefc/io.hpp"

#include <cstdio>
#include <fstream>
#include <string>

namespace safefc {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what)
{
    throw ConfigError("scenario document: " + where + ": " + what);
}

double number(const json& obj, const char* key, const std::string& where)
{
    if (!obj.contains(key)) {
        schema_error(where, std::string("missing '") + key + "'");
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        schema_error(where, std::string("'") + key + "' must be a number");
    }
    return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where)
{
    return obj.contains(key) ? number(obj, key, where) : fallback;
}

std::size_t area_index(const json& v, std::size_t n_areas, const std::string& where)
{
    if (!v.is_number_integer() || v.get<long long>() < 1 || static_cast<std::size_t>(v.get<long long>()) > n_areas) {
        schema_error(where, "area index must be an integer in 1.." + std::to_string(n_areas));
    }
    return static_cast<std::size_t>(v.get<long long>() - 1);
}

Vec vector_of(const json& v, const std::string& where)
{
    if (!v.is_array()) {
        schema_error(where, "expected an array of numbers");
    }
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) {
            schema_error(where, "expected an array of numbers");
        }
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

json vector_json(const Vec& v)
{
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

LoadMode parse_load_mode(const json& v, const std::string& where)
{
    const auto s = v.is_string() ? v.get<std::string>() : std::string();
    if (s == "step_hold") {
        return LoadMode::StepHold;
    }
    if (s == "linear_interpolate") {
        return LoadMode::LinearInterpolate;
    }
    schema_error(where, "load mode must be 'step_hold' or 'linear_interpolate'");
}

const char* load_mode_name(LoadMode m)
{
    return m == LoadMode::StepHold ? "step_hold" : "linear_interpolate";
}

Topology parse_topology(const json& t)
{
    if (!t.is_object()) {
        schema_error("topology", "expected an object");
    }
    Topology topo;
    const double n = number(t, "n_areas", "topology");
    if (n < 1 || n != static_cast<double>(static_cast<long long>(n))) {
        schema_error("topology", "n_areas must be a positive integer");
    }
    topo.n_areas = static_cast<std::size_t>(n);
    const json lines = t.value("tie_lines", json::array());
    if (!lines.is_array()) {
        schema_error("topology", "tie_lines must be an array");
    }
    for (std::size_t e = 0; e < lines.size(); ++e) {
        const std::string where = "tie_lines[" + std::to_string(e) + "]";
        const auto& l = lines[e];
        if (!l.is_object() || !l.contains("endpoints") || !l["endpoints"].is_array() || l["endpoints"].size() != 2) {
            schema_error(where, "expected {endpoints: [i, j], b_linear, b_nonlinear}");
        }
        TieLineParams p;
        p.from = area_index(l["endpoints"][0], topo.n_areas, where);
        p.to = area_index(l["endpoints"][1], topo.n_areas, where);
        p.b_linear = number(l, "b_linear", where);
        p.b_nonlinear = number_or(l, "b_nonlinear", p.b_linear, where);
        topo.tie_lines.push_back(p);
    }
    return topo;
}

AreaParams parse_area(const json& a, const std::string& where)
{
    if (!a.is_object()) {
        schema_error(where, "expected an object");
    }
    AreaParams p;
    p.inertia = number(a, "inertia", where);
    p.damping = number(a, "damping", where);
    p.cost_quad = number(a, "cost_quad", where);
    p.cost_lin = number(a, "cost_lin", where);
    p.cap_lo = number(a, "cap_lo", where);
    p.cap_hi = number(a, "cap_hi", where);
    p.freq_lo = number(a, "freq_lo", where);
    p.freq_hi = number(a, "freq_hi", where);
    p.cbf_gain = number(a, "cbf_gain", where);
    p.baseline_setpoint = number_or(a, "baseline_setpoint", 0.0, where);
    return p;
}

LoadSignal parse_signal(const json& s, LoadMode default_mode, const std::string& where)
{
    LoadSignal sig;
    sig.mode = default_mode;
    const json* points = &s;
    if (s.is_object()) {
        if (s.contains("mode")) {
            sig.mode = parse_load_mode(s["mode"], where);
        }
        if (!s.contains("points")) {
            schema_error(where, "missing 'points'");
        }
        points = &s["points"];
    }
    if (!points->is_array()) {
        schema_error(where, "expected a list of [time, value] pairs");
    }
    for (const auto& p : *points) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            schema_error(where, "expected a list of [time, value] pairs");
        }
        sig.points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return sig;
}

} // namespace

const char* to_string(PlantMode mode)
{
    return mode == PlantMode::Linear ? "linear" : "nonlinear";
}

const char* to_string(ControllerMode mode)
{
    return mode == ControllerMode::FoCbf ? "fo_cbf" : "fo_plain";
}

const char* to_string(Integrator integrator)
{
    return integrator == Integrator::Euler ? "euler" : "rk4";
}

PlantMode parse_plant_mode(std::string_view text)
{
    if (text == "linear") {
        return PlantMode::Linear;
    }
    if (text == "nonlinear") {
        return PlantMode::Nonlinear;
    }
    throw ConfigError("plant mode must be 'linear' or 'nonlinear', got '" + std::string(text) + "'");
}

ControllerMode parse_controller_mode(std::string_view text)
{
    if (text == "fo_cbf") {
        return ControllerMode::FoCbf;
    }
    if (text == "fo_plain") {
        return ControllerMode::FoPlain;
    }
    throw ConfigError("controller mode must be 'fo_cbf' or 'fo_plain', got '" + std::string(text) + "'");
}

Integrator parse_integrator(std::string_view text)
{
    if (text == "euler") {
        return Integrator::Euler;
    }
    if (text == "rk4") {
        return Integrator::Rk4;
    }
    throw ConfigError("integrator must be 'euler' or 'rk4', got '" + std::string(text) + "'");
}

ScenarioConfig scenario_from_json(const json& doc)
{
    if (!doc.is_object()) {
        schema_error("document", "expected an object at top level");
    }
    for (const char* key : {"topology", "areas", "load"}) {
        if (!doc.contains(key)) {
            schema_error("document", std::string("missing '") + key + "'");
        }
    }
    ScenarioConfig c;
    c.name = doc.value("name", std::string("custom"));
    c.topology = parse_topology(doc["topology"]);

    const auto& areas = doc["areas"];
    if (!areas.is_array()) {
        schema_error("areas", "expected an array");
    }
    for (std::size_t i = 0; i < areas.size(); ++i) {
        c.areas.push_back(parse_area(areas[i], "areas[" + std::to_string(i) + "]"));
    }

    const auto& load = doc["load"];
    if (!load.is_object() || !load.contains("signals") || !load["signals"].is_array()) {
        schema_error("load", "expected {signals: [...]}");
    }
    const LoadMode default_mode = load.contains("mode") ? parse_load_mode(load["mode"], "load") : LoadMode::StepHold;
    c.load.prediction_error_factor = number_or(load, "prediction_error_factor", 1.0, "load");
    for (std::size_t i = 0; i < load["signals"].size(); ++i) {
        c.load.signals.push_back(parse_signal(load["signals"][i], default_mode, "load.signals[" + std::to_string(i) + "]"));
    }

    const json schedule = doc.value("schedule", json::array());
    if (!schedule.is_array()) {
        schema_error("schedule", "expected an array");
    }
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const std::string where = "schedule[" + std::to_string(k) + "]";
        const auto& s = schedule[k];
        if (!s.is_object() || !s.contains("area") || !s.contains("field")) {
            schema_error(where, "expected {time, area, field, factor}");
        }
        ParameterOverride o;
        o.time = number(s, "time", where);
        o.area = area_index(s["area"], c.areas.size(), where);
        const auto field = s["field"].is_string() ? s["field"].get<std::string>() : std::string();
        if (field == "M") {
            o.field = ParamField::Inertia;
        } else if (field == "D") {
            o.field = ParamField::Damping;
        } else {
            schema_error(where, "field must be 'M' or 'D'");
        }
        o.factor = number(s, "factor", where);
        c.schedule.push_back(o);
    }

    const json sim = doc.value("sim", json::object());
    if (!sim.is_object()) {
        schema_error("sim", "expected an object");
    }
    auto text = [&](const char* key, const char* fallback) {
        if (!sim.contains(key)) {
            return std::string(fallback);
        }
        if (!sim[key].is_string()) {
            schema_error("sim", std::string("'") + key + "' must be a string");
        }
        return sim[key].get<std::string>();
    };
    c.sim.plant_mode = parse_plant_mode(text("plant_mode", "linear"));
    c.sim.controller_mode = parse_controller_mode(text("controller_mode", "fo_cbf"));
    c.sim.integrator = parse_integrator(text("integrator", "euler"));
    c.sim.dt = number_or(sim, "dt", c.sim.dt, "sim");
    c.sim.t_end = number_or(sim, "t_end", c.sim.t_end, "sim");
    const double decimate = number_or(sim, "decimate", 1.0, "sim");
    if (decimate < 1 || decimate != static_cast<double>(static_cast<long long>(decimate))) {
        schema_error("sim", "decimate must be a positive integer");
    }
    c.sim.decimate = static_cast<std::size_t>(decimate);
    if (sim.contains("seed")) {
        if (!sim["seed"].is_number_unsigned()) {
            schema_error("sim", "seed must be a nonnegative integer");
        }
        c.seed = sim["seed"].get<std::uint64_t>();
    }
    if (sim.contains("controller_tracks_schedule")) {
        if (!sim["controller_tracks_schedule"].is_boolean()) {
            schema_error("sim", "controller_tracks_schedule must be a boolean");
        }
        c.sim.controller_tracks_schedule = sim["controller_tracks_schedule"].get<bool>();
    }
    c.sim.nominal_hz = number_or(sim, "nominal_hz", c.sim.nominal_hz, "sim");
    c.sim.settle_tol_hz = number_or(sim, "settle_tol_hz", c.sim.settle_tol_hz, "sim");

    const auto n = static_cast<Eigen::Index>(c.topology.n_areas);
    c.initial_plant = {Vec::Zero(n > 0 ? n - 1 : 0), Vec::Zero(n)};
    c.initial_controller = {Vec::Zero(n), Vec::Zero(n)};
    const json initial = sim.value("initial", json::object());
    if (initial.contains("alpha")) {
        c.initial_plant.alpha = vector_of(initial["alpha"], "sim.initial.alpha");
    }
    if (initial.contains("w")) {
        c.initial_plant.w = vector_of(initial["w"], "sim.initial.w");
    }
    if (initial.contains("pg_ref")) {
        c.initial_controller.pg_ref = vector_of(initial["pg_ref"], "sim.initial.pg_ref");
    }
    if (initial.contains("xi")) {
        c.initial_controller.xi = vector_of(initial["xi"], "sim.initial.xi");
    }
    return c;
}

json scenario_to_json(const ScenarioConfig& c)
{
    json doc;
    doc["name"] = c.name;
    json lines = json::array();
    for (const auto& l : c.topology.tie_lines) {
        lines.push_back({{"endpoints", {l.from + 1, l.to + 1}}, {"b_linear", l.b_linear}, {"b_nonlinear", l.b_nonlinear}});
    }
    doc["topology"] = {{"n_areas", c.topology.n_areas}, {"tie_lines", lines}};

    json areas = json::array();
    for (const auto& a : c.areas) {
        areas.push_back({{"inertia", a.inertia},
                         {"damping", a.damping},
                         {"cost_quad", a.cost_quad},
                         {"cost_lin", a.cost_lin},
                         {"cap_lo", a.cap_lo},
                         {"cap_hi", a.cap_hi},
                         {"freq_lo", a.freq_lo},
                         {"freq_hi", a.freq_hi},
                         {"cbf_gain", a.cbf_gain},
                         {"baseline_setpoint", a.baseline_setpoint}});
    }
    doc["areas"] = areas;

    json signals = json::array();
    for (const auto& s : c.load.signals) {
        json points = json::array();
        for (const auto& p : s.points) {
            points.push_back({p.time, p.value});
        }
        signals.push_back({{"mode", load_mode_name(s.mode)}, {"points", points}});
    }
    doc["load"] = {{"prediction_error_factor", c.load.prediction_error_factor}, {"signals", signals}};

    json schedule = json::array();
    for (const auto& o : c.schedule) {
        schedule.push_back({{"time", o.time},
                            {"area", o.area + 1},
                            {"field", o.field == ParamField::Inertia ? "M" : "D"},
                            {"factor", o.factor}});
    }
    doc["schedule"] = schedule;

    doc["sim"] = {{"plant_mode", to_string(c.sim.plant_mode)},
                  {"controller_mode", to_string(c.sim.controller_mode)},
                  {"integrator", to_string(c.sim.integrator)},
                  {"dt", c.sim.dt},
                  {"t_end", c.sim.t_end},
                  {"decimate", c.sim.decimate},
                  {"seed", c.seed},
                  {"controller_tracks_schedule", c.sim.controller_tracks_schedule},
                  {"nominal_hz", c.sim.nominal_hz},
                  {"settle_tol_hz", c.sim.settle_tol_hz},
                  {"initial",
                   {{"alpha", vector_json(c.initial_plant.alpha)},
                    {"w", vector_json(c.initial_plant.w)},
                    {"pg_ref", vector_json(c.initial_controller.pg_ref)},
                    {"xi", vector_json(c.initial_controller.xi)}}}};
    return doc;
}

ScenarioConfig load_scenario_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ScenarioFileNotFound("cannot open scenario file " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return scenario_from_json(doc);
}

std::string trajectory_csv_header(const ScenarioConfig& config)
{
    const std::size_t n = config.topology.n_areas;
    const std::size_t m = config.topology.tie_lines.size();
    std::string h = "t";
    auto group = [&](const char* prefix, std::size_t count) {
        for (std::size_t i = 1; i <= count; ++i) {
            h += ",";
            h += prefix;
            h += std::to_string(i);
        }
    };
    group("w_", n);
    group("alpha_", n - 1);
    group("Pg_", n);
    group("Pgr_", n);
    group("xi_", n);
    group("flow_e", m);
    group("lb_", n);
    group("ub_", n);
    h += ",V,dVdt,cost,feas_flags";
    return h;
}

void write_trajectory_csv(std::ostream& out, const RunResult& result, const ScenarioConfig& config)
{
    out << trajectory_csv_header(config) << '\n';
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        out << buf;
    };
    auto put_vec = [&](const Vec& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            put(v[i]);
        }
    };
    for (const auto& r : result.records) {
        std::snprintf(buf, sizeof buf, "%.17g", r.t);
        out << buf;
        for (Eigen::Index i = 0; i < r.plant.w.size(); ++i) {
            put(to_hz(r.plant.w[i], config.sim.nominal_hz));
        }
        put_vec(r.plant.alpha);
        put_vec(r.pg);
        put_vec(r.controller.pg_ref);
        put_vec(r.controller.xi);
        put_vec(r.edge_flows);
        for (const auto& b : r.bounds) {
            put(b.lb);
        }
        for (const auto& b : r.bounds) {
            put(b.ub);
        }
        put(r.lyapunov);
        put(r.lyapunov_rate);
        put(r.cost);
        out << ',';
        for (const auto& b : r.bounds) {
            out << (b.feasible ? '1' : '0');
        }
        out << '\n';
    }
}

json metrics_to_json(const Metrics& m)
{
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    return {{"nadir_hz", m.nadir_hz},
            {"zenith_hz", m.zenith_hz},
            {"settling_time_s", opt(m.settling_time_s)},
            {"safe_entry_time_s", opt(m.safe_entry_time_s)},
            {"started_outside_band", m.started_outside_band},
            {"violation_count", m.violation_count},
            {"violation_integral_hz_s", m.violation_integral_hz_s},
            {"max_rocof_hz_s", m.max_rocof_hz_s},
            {"final_cost", m.final_cost},
            {"steady_residual", opt(m.steady_residual)}};
}

json invariants_to_json(const InvariantReport& r)
{
    return {{"steps", r.steps},
            {"safety_violations", r.safety_violations},
            {"capacity_violations", r.capacity_violations},
            {"monotonicity_violations", r.monotonicity_violations},
            {"dissipation_violations", r.dissipation_violations},
            {"cbf_residual_violations", r.cbf_residual_violations},
            {"infeasibility_events", r.infeasibility_events},
            {"worst_safety_margin", r.worst_safety_margin},
            {"worst_capacity_margin", r.worst_capacity_margin},
            {"max_active_lyapunov_rate", r.max_active_lyapunov_rate},
            {"ok", r.ok()}};
}

} // namespace safefc
