#pragma once

// Scenario documents (JSON), trajectory CSV and metrics JSON.

#include "safefc/model.hpp"
#include "safefc/sim.hpp"

#include <json.hpp>

#include <filesystem>
#include <ostream>
#include <stdexcept>

namespace safefc {

class ScenarioFileNotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses a scenario document with top-level keys `topology`, `areas`,
/// `load`, `schedule`, `sim`. Area indices in the document are 1-based.
/// Throws ConfigError on schema problems.
[[nodiscard]] ScenarioConfig scenario_from_json(const nlohmann::json& doc);

[[nodiscard]] nlohmann::json scenario_to_json(const ScenarioConfig& config);

/// Throws ScenarioFileNotFound or ConfigError.
[[nodiscard]] ScenarioConfig load_scenario_file(const std::filesystem::path& path);

void write_trajectory_csv(std::ostream& out, const RunResult& result, const ScenarioConfig& config);

[[nodiscard]] std::string trajectory_csv_header(const ScenarioConfig& config);

[[nodiscard]] nlohmann::json metrics_to_json(const Metrics& metrics);

[[nodiscard]] nlohmann::json invariants_to_json(const InvariantReport& report);

[[nodiscard]] const char* to_string(PlantMode mode);
[[nodiscard]] const char* to_string(ControllerMode mode);
[[nodiscard]] const char* to_string(Integrator integrator);
[[nodiscard]] PlantMode parse_plant_mode(std::string_view text);
[[nodiscard]] ControllerMode parse_controller_mode(std::string_view text);
[[nodiscard]] Integrator parse_integrator(std::string_view text);

} // namespace safefc
