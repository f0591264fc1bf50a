#pragma once

// Command-line front end: scenario resolution, run artifacts, comparisons.

#include "safefc/model.hpp"
#include "safefc/sim.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace safefc::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kUsage = 2,
    kMissingFile = 3,
    kInvalidConfig = 4,
    kNumericalFailure = 5,
};

struct RunOptions {
    std::string scenario; ///< shipped name or path to a JSON document
    std::optional<std::string> controller;
    std::optional<std::string> plant;
    std::optional<std::string> integrator;
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<std::size_t> decimate;
    std::optional<std::filesystem::path> out_dir;
    bool check = false;
};

/// Shipped scenario or file, with flag overrides applied. Throws
/// ScenarioFileNotFound or ConfigError.
[[nodiscard]] ScenarioConfig resolve_scenario(const RunOptions& options);

/// Invariant suite used by `--check`.
[[nodiscard]] bool check_passes(const RunResult& result);

/// Writes trajectory.csv, metrics.json and scenario.json into `dir`.
void write_artifacts(const std::filesystem::path& dir, const ScenarioConfig& config, const RunResult& result);

void print_summary(std::ostream& out, const ScenarioConfig& config, const RunResult& result);

/// Runs one scenario end to end and returns the process exit code.
[[nodiscard]] int run_scenario(const RunOptions& options, std::ostream& out, std::ostream& err);

struct AreaDelta {
    double nadir_hz = 0.0;  ///< left minus right
    double zenith_hz = 0.0;
};

struct Comparison {
    ScenarioConfig left_config;
    ScenarioConfig right_config;
    RunResult left;
    RunResult right;
    std::vector<AreaDelta> deltas;
    std::optional<double> oracle_cost; ///< optimum for the load at t_end
};

/// Runs the scenario under both controller modes concurrently.
[[nodiscard]] Comparison compare(const ScenarioConfig& base, ControllerMode left, ControllerMode right);

void print_comparison(std::ostream& out, const Comparison& comparison);

/// Parses argv and dispatches to `run`, `compare`, `list` or `export`.
[[nodiscard]] int main(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace safefc::cli
