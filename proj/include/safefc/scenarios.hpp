#pragma once

// Shipped three-area scenario library.

#include "safefc/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace safefc::scenarios {

/// Triangle 1–2, 2–3, 1–3 with B = B̂ = 10 p.u. on every line.
[[nodiscard]] Topology default_topology();

/// Default per-area parameters; the band is ±0.1 Hz around 50 Hz.
[[nodiscard]] std::vector<AreaParams> default_areas();

/// Loads step to 0.8 / 0.5 / 0.7 p.u. at t = 10 s from the origin.
[[nodiscard]] ScenarioConfig s1_step();

/// All areas start at 49.8 Hz with zero controller state under the
/// post-step loads of s1_step.
[[nodiscard]] ScenarioConfig s2_restore();

/// 900 s of time-varying load with 5 % controller-side load error, seeded
/// ±5 % damping drift and inertia steps at 300/450/600 s.
[[nodiscard]] ScenarioConfig s3_timevarying(std::uint64_t seed = 7);

[[nodiscard]] std::vector<std::string> names();

[[nodiscard]] std::optional<ScenarioConfig> find(std::string_view name);

} // namespace safefc::scenarios
