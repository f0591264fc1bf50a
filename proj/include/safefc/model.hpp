#pragma once

// Domain types for multi-area frequency control scenarios.
//
// All states are deviations from a pre-disturbance operating point:
// frequencies in per-unit of nominal frequency, powers in per-unit of the
// system base, angles in radians.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace safefc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Physical, economic and safety data of one control area.
struct AreaParams {
    double inertia = 0.0;   ///< M, p.u.·s²
    double damping = 0.0;   ///< D, p.u.·s
    double cost_quad = 0.0; ///< a_g, $/p.u.²
    double cost_lin = 0.0;  ///< b_g, $/p.u.
    double cap_lo = 0.0;    ///< lower generation capacity (deviation, p.u.)
    double cap_hi = 0.0;    ///< upper generation capacity (deviation, p.u.)
    double freq_lo = 0.0;   ///< lower safe frequency deviation (p.u.), < 0
    double freq_hi = 0.0;   ///< upper safe frequency deviation (p.u.), > 0
    double cbf_gain = 0.0;  ///< β, 1/s
    /// Absolute pre-disturbance setpoint added to powers for display only.
    double baseline_setpoint = 0.0;

    bool operator==(const AreaParams&) const = default;
};

/// One tie-line. `from` is the tail of the oriented edge, `to` the head.
struct TieLineParams {
    std::size_t from = 0;
    std::size_t to = 0;
    double b_linear = 0.0;    ///< B_ij, p.u./rad
    double b_nonlinear = 0.0; ///< B̂_ij, p.u.
};

struct Topology {
    std::size_t n_areas = 0;
    std::vector<TieLineParams> tie_lines;
};

enum class LoadMode { StepHold, LinearInterpolate };

struct LoadBreakpoint {
    double time = 0.0;
    double value = 0.0;
};

/// Piecewise net-load signal of one area. Before the first breakpoint the
/// first value is held; after the last, the last value.
struct LoadSignal {
    LoadMode mode = LoadMode::StepHold;
    std::vector<LoadBreakpoint> points;

    [[nodiscard]] double at(double t) const;
};

struct LoadProfile {
    std::vector<LoadSignal> signals; ///< one per area
    /// Multiplier on the controller's view of the load; the plant always
    /// sees the true value.
    double prediction_error_factor = 1.0;
};

struct LoadSample {
    Vec plant;      ///< true net load
    Vec controller; ///< what the controller measures / predicts
};

[[nodiscard]] LoadSample load_at(const LoadProfile& profile, double t);

enum class ParamField { Inertia, Damping };

/// Multiplicative override of a base parameter from `time` onwards.
struct ParameterOverride {
    double time = 0.0;
    std::size_t area = 0;
    ParamField field = ParamField::Inertia;
    double factor = 1.0;
};

using ParameterSchedule = std::vector<ParameterOverride>;

/// Applies every override with activation time <= t. For the same area and
/// field the latest activation wins (list order breaks ties). Factors are
/// relative to `base`, they do not compound. Throws std::invalid_argument
/// for a nonpositive resulting inertia or damping.
[[nodiscard]] std::vector<AreaParams> params_at(std::span<const AreaParams> base,
                                                const ParameterSchedule& schedule, double t);

/// True when no override activates in (t0, t1].
[[nodiscard]] bool schedule_constant_on(const ParameterSchedule& schedule, double t0, double t1);

struct PlantState {
    Vec alpha; ///< reduced angles θ_i − θ_N, length N−1
    Vec w;     ///< frequency deviations, length N
};

struct ControllerState {
    Vec pg_ref; ///< FO reference P_g^r, kept inside the capacity box
    Vec xi;     ///< multipliers of the power-balance constraint
};

enum class PlantMode { Linear, Nonlinear };
enum class ControllerMode { FoCbf, FoPlain };
enum class Integrator { Euler, Rk4 };

struct SimSettings {
    PlantMode plant_mode = PlantMode::Linear;
    ControllerMode controller_mode = ControllerMode::FoCbf;
    Integrator integrator = Integrator::Euler;
    double dt = 1e-3;
    double t_end = 60.0;
    std::size_t decimate = 1;
    /// When set, the controller uses the scheduled M and D instead of the
    /// nominal ones.
    bool controller_tracks_schedule = false;
    double nominal_hz = 50.0;
    /// Settling band half-width, in Hz deviation from nominal.
    double settle_tol_hz = 0.002;
};

struct ScenarioConfig {
    std::string name;
    Topology topology;
    std::vector<AreaParams> areas;
    LoadProfile load;
    ParameterSchedule schedule;
    SimSettings sim;
    PlantState initial_plant;
    ControllerState initial_controller;
    std::uint64_t seed = 0;
};

struct ValidationReport {
    std::vector<std::string> issues;

    [[nodiscard]] bool ok() const { return issues.empty(); }
};

/// Collects every violated invariant; an empty report means runnable.
[[nodiscard]] ValidationReport validate(const ScenarioConfig& config);

[[nodiscard]] inline double to_hz(double w_pu, double nominal_hz) { return nominal_hz * (1.0 + w_pu); }
[[nodiscard]] inline double hz_to_pu(double f_hz, double nominal_hz) { return f_hz / nominal_hz - 1.0; }

/// Capacity box and safe band of all areas as vectors.
[[nodiscard]] Vec cap_lo_vec(std::span<const AreaParams> areas);
[[nodiscard]] Vec cap_hi_vec(std::span<const AreaParams> areas);

} // namespace safefc
