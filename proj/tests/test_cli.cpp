#include "catch_amalgamated.hpp"

#include "safefc/cli.hpp"
#include "safefc/io.hpp"
#include "safefc/scenarios.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace safefc;
namespace fs = std::filesystem;

namespace {

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "safefc");
    std::vector<char*> argv;
    for (auto& a : args) {
        argv.push_back(a.data());
    }
    std::ostringstream out, err;
    const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST_CASE("flag overrides apply on top of the shipped scenario")
{
    cli::RunOptions o;
    o.scenario = "s2_restore";
    o.controller = "fo_plain";
    o.plant = "nonlinear";
    o.dt = 0.002;
    o.t_end = 3.0;
    o.decimate = 7;
    const auto c = cli::resolve_scenario(o);
    CHECK(c.sim.controller_mode == ControllerMode::FoPlain);
    CHECK(c.sim.plant_mode == PlantMode::Nonlinear);
    CHECK(c.sim.dt == 0.002);
    CHECK(c.sim.t_end == 3.0);
    CHECK(c.sim.decimate == 7);
}

TEST_CASE("run writes artifacts")
{
    const fs::path dir = fs::temp_directory_path() / "safefc_cli_test_run";
    fs::remove_all(dir);
    const auto r = invoke({"run", "--scenario", "s1_step", "--t-end", "15", "--out", dir.string()});
    CHECK(r.code == cli::kOk);
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "scenario.json"));
    std::ifstream in(dir / "metrics.json");
    const auto metrics = nlohmann::json::parse(in);
    CHECK(metrics["violation_integral_hz_s"] == 0.0);
    CHECK(metrics["invariants"]["ok"] == true);

    const auto again = invoke({"run", "--scenario", (dir / "scenario.json").string(), "--check"});
    CHECK(again.code == cli::kOk);
}

TEST_CASE("exit codes")
{
    CHECK(invoke({"run", "--scenario", "s1_step", "--controller", "fo_plain", "--t-end", "30", "--check"}).code ==
          cli::kCheckFailed);
    CHECK(invoke({"run", "--scenario", "missing.json"}).code == cli::kMissingFile);
    CHECK(invoke({"run"}).code == cli::kUsage);
    CHECK(invoke({"frobnicate"}).code == cli::kUsage);
    CHECK(invoke({"run", "--scenario", "s1_step", "--dt", "-1"}).code == cli::kInvalidConfig);

    const fs::path bad = fs::temp_directory_path() / "safefc_bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK(invoke({"run", "--scenario", bad.string()}).code == cli::kInvalidConfig);

    auto diverging = scenarios::s1_step();
    diverging.areas[0].inertia = 1e-4;
    diverging.sim.controller_mode = ControllerMode::FoPlain;
    diverging.sim.dt = 5.0;
    diverging.sim.t_end = 5e4;
    const fs::path div = fs::temp_directory_path() / "safefc_diverging.json";
    std::ofstream(div) << scenario_to_json(diverging).dump();
    CHECK(invoke({"run", "--scenario", div.string()}).code == cli::kNumericalFailure);
}

TEST_CASE("s2_restore passes the check with a finite entry time")
{
    const fs::path dir = fs::temp_directory_path() / "safefc_cli_test_s2";
    const auto r = invoke({"run", "--scenario", "s2_restore", "--check", "--out", dir.string()});
    CHECK(r.code == cli::kOk);
    std::ifstream in(dir / "metrics.json");
    const auto metrics = nlohmann::json::parse(in);
    CHECK(metrics["safe_entry_time_s"].is_number());
}

TEST_CASE("comparing a mode with itself gives zero deltas")
{
    auto c = scenarios::s1_step();
    c.sim.t_end = 30.0;
    const auto cmp = cli::compare(c, ControllerMode::FoCbf, ControllerMode::FoCbf);
    for (const auto& d : cmp.deltas) {
        CHECK(d.nadir_hz == 0.0);
        CHECK(d.zenith_hz == 0.0);
    }
}

TEST_CASE("both modes reach the oracle cost on s1_step")
{
    const auto cmp = cli::compare(scenarios::s1_step(), ControllerMode::FoCbf, ControllerMode::FoPlain);
    REQUIRE(cmp.oracle_cost.has_value());
    CHECK(cmp.left.metrics.final_cost == Catch::Approx(*cmp.oracle_cost).epsilon(1e-3));
    CHECK(cmp.right.metrics.final_cost == Catch::Approx(*cmp.oracle_cost).epsilon(1e-3));
    CHECK(cmp.left.metrics.violation_integral_hz_s == 0.0);
    CHECK(cmp.right.metrics.violation_integral_hz_s > 0.0);
    std::ostringstream out;
    cli::print_comparison(out, cmp);
    CHECK(out.str().find("oracle cost") != std::string::npos);
}

TEST_CASE("list and export")
{
    const auto l = invoke({"list"});
    CHECK(l.out == "s1_step\ns2_restore\ns3_timevarying\n");
    const auto e = invoke({"export", "--scenario", "s2_restore"});
    CHECK(e.code == cli::kOk);
    CHECK(nlohmann::json::parse(e.out)["name"] == "s2_restore");
}
