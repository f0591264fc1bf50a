#include "safefc/cli.hpp"

#include "safefc/io.hpp"
#include "safefc/oracle.hpp"
#include "safefc/scenarios.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <future>

namespace safefc::cli {

namespace {

std::string num(double v, const char* fmt = "%.6g")
{
    char buf[48];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string opt_num(const std::optional<double>& v)
{
    return v ? num(*v, "%.3f") : std::string("n/a");
}

void add_common(CLI::App* cmd, RunOptions& o)
{
    cmd->add_option("--scenario", o.scenario, "shipped scenario name or path to a JSON scenario")->required();
    cmd->add_option("--plant", o.plant, "linear | nonlinear");
    cmd->add_option("--integrator", o.integrator, "euler | rk4");
    cmd->add_option("--dt", o.dt, "step size in seconds");
    cmd->add_option("--t-end", o.t_end, "horizon in seconds");
    cmd->add_option("--decimate", o.decimate, "keep every k-th record")->check(CLI::PositiveNumber);
}

} // namespace

ScenarioConfig resolve_scenario(const RunOptions& o)
{
    ScenarioConfig c;
    if (auto builtin = scenarios::find(o.scenario)) {
        c = std::move(*builtin);
    } else {
        c = load_scenario_file(o.scenario);
    }
    if (o.controller) {
        c.sim.controller_mode = parse_controller_mode(*o.controller);
    }
    if (o.plant) {
        c.sim.plant_mode = parse_plant_mode(*o.plant);
    }
    if (o.integrator) {
        c.sim.integrator = parse_integrator(*o.integrator);
    }
    if (o.dt) {
        c.sim.dt = *o.dt;
    }
    if (o.t_end) {
        c.sim.t_end = *o.t_end;
    }
    if (o.decimate) {
        c.sim.decimate = *o.decimate;
    }
    return c;
}

bool check_passes(const RunResult& r)
{
    return r.status == RunStatus::Ok && r.invariants.ok() &&
           (!r.metrics.started_outside_band || r.metrics.safe_entry_time_s.has_value());
}

void write_artifacts(const std::filesystem::path& dir, const ScenarioConfig& config, const RunResult& result)
{
    std::filesystem::create_directories(dir);
    std::ofstream csv(dir / "trajectory.csv");
    write_trajectory_csv(csv, result, config);
    auto metrics = metrics_to_json(result.metrics);
    metrics["invariants"] = invariants_to_json(result.invariants);
    metrics["status"] = result.status == RunStatus::Ok ? "ok" : "non_finite";
    metrics["infeasibility_events"] = result.events.size();
    if (!result.message.empty()) {
        metrics["message"] = result.message;
    }
    std::ofstream(dir / "metrics.json") << metrics.dump(2) << '\n';
    std::ofstream(dir / "scenario.json") << scenario_to_json(config).dump(2) << '\n';
}

void print_summary(std::ostream& out, const ScenarioConfig& c, const RunResult& r)
{
    out << "scenario " << c.name << "  controller " << to_string(c.sim.controller_mode) << "  plant "
        << to_string(c.sim.plant_mode) << "  dt " << c.sim.dt << "  t_end " << c.sim.t_end << '\n';
    for (std::size_t i = 0; i < r.metrics.nadir_hz.size(); ++i) {
        out << "  area " << i + 1 << "  nadir " << num(r.metrics.nadir_hz[i], "%.5f") << " Hz  zenith "
            << num(r.metrics.zenith_hz[i], "%.5f") << " Hz\n";
    }
    out << "  settling " << opt_num(r.metrics.settling_time_s) << " s  safe entry "
        << opt_num(r.metrics.safe_entry_time_s) << " s  violation integral "
        << num(r.metrics.violation_integral_hz_s) << " Hz*s  max RoCoF " << num(r.metrics.max_rocof_hz_s)
        << " Hz/s\n";
    out << "  final cost " << num(r.metrics.final_cost, "%.6f") << "  steady residual "
        << (r.metrics.steady_residual ? num(*r.metrics.steady_residual, "%.3e") : std::string("n/a")) << '\n';
    for (const auto& f : r.invariants.failures()) {
        out << "  invariant: " << f << '\n';
    }
}

int run_scenario(const RunOptions& options, std::ostream& out, std::ostream& err)
{
    const ScenarioConfig config = resolve_scenario(options);
    const RunResult result = Simulator(config).run();
    print_summary(out, config, result);
    if (options.out_dir) {
        write_artifacts(*options.out_dir, config, result);
        out << "  wrote " << options.out_dir->string() << '\n';
    }
    if (result.status != RunStatus::Ok) {
        err << "numerical failure: " << result.message << '\n';
        return kNumericalFailure;
    }
    if (options.check && !check_passes(result)) {
        err << "check failed\n";
        return kCheckFailed;
    }
    return kOk;
}

Comparison compare(const ScenarioConfig& base, ControllerMode left, ControllerMode right)
{
    Comparison c;
    c.left_config = base;
    c.left_config.sim.controller_mode = left;
    c.right_config = base;
    c.right_config.sim.controller_mode = right;
    const Simulator sim_left(c.left_config);
    const Simulator sim_right(c.right_config);

    auto f_left = std::async(std::launch::async, [&] { return sim_left.run(); });
    auto f_right = std::async(std::launch::async, [&] { return sim_right.run(); });
    c.left = f_left.get();
    c.right = f_right.get();

    for (std::size_t i = 0; i < c.left.metrics.nadir_hz.size(); ++i) {
        c.deltas.push_back({c.left.metrics.nadir_hz[i] - c.right.metrics.nadir_hz[i],
                            c.left.metrics.zenith_hz[i] - c.right.metrics.zenith_hz[i]});
    }
    try {
        c.oracle_cost = solve_steady_qp(load_at(base.load, base.sim.t_end).plant, base.areas).cost;
    } catch (const InfeasibleDispatch&) {
        c.oracle_cost.reset();
    }
    return c;
}

void print_comparison(std::ostream& out, const Comparison& c)
{
    const auto& a = c.left.metrics;
    const auto& b = c.right.metrics;
    char line[160];
    auto row = [&](const char* name, const std::string& x, const std::string& y) {
        std::snprintf(line, sizeof line, "%-26s %16s %16s\n", name, x.c_str(), y.c_str());
        out << line;
    };
    out << "scenario " << c.left_config.name << "  plant " << to_string(c.left_config.sim.plant_mode) << '\n';
    row("metric", to_string(c.left_config.sim.controller_mode), to_string(c.right_config.sim.controller_mode));
    for (std::size_t i = 0; i < a.nadir_hz.size(); ++i) {
        const std::string label = "nadir_hz area " + std::to_string(i + 1);
        row(label.c_str(), num(a.nadir_hz[i], "%.5f"), num(b.nadir_hz[i], "%.5f"));
    }
    row("settling_time_s", opt_num(a.settling_time_s), opt_num(b.settling_time_s));
    row("safe_entry_time_s", opt_num(a.safe_entry_time_s), opt_num(b.safe_entry_time_s));
    row("violation_integral_hz_s", num(a.violation_integral_hz_s), num(b.violation_integral_hz_s));
    row("max_rocof_hz_s", num(a.max_rocof_hz_s), num(b.max_rocof_hz_s));
    row("final_cost", num(a.final_cost, "%.6f"), num(b.final_cost, "%.6f"));
    out << "oracle cost " << (c.oracle_cost ? num(*c.oracle_cost, "%.6f") : std::string("infeasible")) << "\n\n";

    std::snprintf(line, sizeof line, "%-6s %16s %16s\n", "area", "d nadir (Hz)", "d zenith (Hz)");
    out << line;
    for (std::size_t i = 0; i < c.deltas.size(); ++i) {
        std::snprintf(line, sizeof line, "%-6zu %16.6f %16.6f\n", i + 1, c.deltas[i].nadir_hz, c.deltas[i].zenith_hz);
        out << line;
    }
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Safe feedback-optimization frequency control simulator"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "simulate one scenario");
    add_common(run, run_opts);
    run->add_option("--controller", run_opts.controller, "fo_cbf | fo_plain");
    run->add_option("--out", run_opts.out_dir, "directory for trajectory.csv, metrics.json, scenario.json");
    run->add_flag("--check", run_opts.check, "exit 1 if any runtime invariant fails");

    RunOptions cmp_opts;
    std::string left = "fo_cbf";
    std::string right = "fo_plain";
    auto* cmp = app.add_subcommand("compare", "run two controller modes side by side");
    add_common(cmp, cmp_opts);
    cmp->add_option("--left", left, "first controller mode")->capture_default_str();
    cmp->add_option("--right", right, "second controller mode")->capture_default_str();

    auto* list = app.add_subcommand("list", "print shipped scenario names");

    RunOptions export_opts;
    auto* exp = app.add_subcommand("export", "print the resolved scenario document");
    add_common(exp, export_opts);
    exp->add_option("--controller", export_opts.controller, "fo_cbf | fo_plain");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    try {
        if (*list) {
            for (const auto& n : scenarios::names()) {
                out << n << '\n';
            }
            return kOk;
        }
        if (*run) {
            return run_scenario(run_opts, out, err);
        }
        if (*exp) {
            out << scenario_to_json(resolve_scenario(export_opts)).dump(2) << '\n';
            return kOk;
        }
        const auto report = compare(resolve_scenario(cmp_opts), parse_controller_mode(left), parse_controller_mode(right));
        print_comparison(out, report);
        if (report.left.status != RunStatus::Ok || report.right.status != RunStatus::Ok) {
            err << "numerical failure\n";
            return kNumericalFailure;
        }
        return kOk;
    } catch (const ScenarioFileNotFound& e) {
        err << "error: " << e.what() << '\n';
        return kMissingFile;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const TopologyError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

} // namespace safefc::cli
