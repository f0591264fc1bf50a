#pragma once

// Fixed-step closed-loop simulation with runtime monitors.

#include "safefc/control.hpp"
#include "safefc/graph.hpp"
#include "safefc/model.hpp"
#include "safefc/oracle.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace safefc {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AreaMonitor {
    double safety_margin = 0.0;   ///< min(w − w_lo, w_hi − w)
    double capacity_margin = 0.0; ///< min(P_g − cap_lo, cap_hi − P_g)
    double cbf_residual_lo = 0.0; ///< l_raw − P_g, ≤ 0 when the lower barrier holds
    double cbf_residual_hi = 0.0; ///< P_g − u_raw, ≤ 0 when the upper barrier holds
    double w_dot = 0.0;           ///< analytic plant frequency rate
    bool monotone = true;         ///< out of band ⇒ ẇ points back towards the band
};

struct TrajectoryRecord {
    double t = 0.0;
    PlantState plant;
    ControllerState controller;
    Vec pg;
    Vec d_true;
    Vec d_view;
    Vec edge_flows;
    std::vector<CorrectorBounds> bounds;
    std::vector<AreaMonitor> monitors;
    double lyapunov = 0.0;      ///< NaN when no equilibrium is available
    double lyapunov_rate = 0.0; ///< (V(z⁺) − V(z)) / dt against the same equilibrium; NaN at the end
    /// Constant load and parameters over the step, linear plant, exact load
    /// knowledge: the hypotheses under which V must not increase.
    bool lyapunov_active = false;
    double cost = 0.0;
};

struct InfeasibilityEvent {
    double t = 0.0;
    std::size_t area = 0;
};

struct MonitorTolerances {
    double safety_slack = 1e-6;      ///< p.u. below the band counted as a violation
    double dissipation_base = 1e-6;  ///< ΔV/Δt ≤ base + per_dt·dt
    double dissipation_per_dt = 10.0;
    double cbf_residual = 1e-12;
};

/// Step-by-step invariant checks, evaluated on every step regardless of
/// record decimation.
struct InvariantReport {
    std::size_t steps = 0;
    /// Out of band by more than the slack after having been inside.
    std::size_t safety_violations = 0;
    std::size_t capacity_violations = 0;
    std::size_t monotonicity_violations = 0;
    std::size_t dissipation_violations = 0;
    std::size_t cbf_residual_violations = 0;
    std::size_t infeasibility_events = 0;
    double worst_safety_margin = 0.0;
    double worst_capacity_margin = 0.0;
    double max_active_lyapunov_rate = 0.0;

    [[nodiscard]] bool ok() const;
    [[nodiscard]] std::vector<std::string> failures() const;
};

struct Metrics {
    std::vector<double> nadir_hz;
    std::vector<double> zenith_hz;
    std::optional<double> settling_time_s;
    /// Only set when the run started outside the band and ended inside.
    std::optional<double> safe_entry_time_s;
    bool started_outside_band = false;
    std::size_t violation_count = 0;       ///< out-of-band area-samples
    double violation_integral_hz_s = 0.0;  ///< Σ_i ∫ band excursion dt
    double max_rocof_hz_s = 0.0;
    double final_cost = 0.0;
    std::optional<double> steady_residual; ///< ‖z(T) − z_e‖ against the final load
};

enum class RunStatus { Ok, NonFinite };

struct RunResult {
    std::vector<TrajectoryRecord> records;
    std::vector<InfeasibilityEvent> events;
    Metrics metrics;
    InvariantReport invariants;
    RunStatus status = RunStatus::Ok;
    std::string message;
};

/// V = ½α̂ᵀF̃BF̃ᵀα̂ + ½ŵᵀMŵ + ½‖P̂^r‖² + ½‖ξ̂‖², hats relative to `eq`.
[[nodiscard]] double lyapunov(const PlantState& plant, const ControllerState& ctrl, const Equilibrium& eq,
                              std::span<const AreaParams> params, const Network& net);

/// Per-area monitor values for a state, its applied power and the plant rate.
[[nodiscard]] std::vector<AreaMonitor> evaluate_monitors(const Vec& w, const Vec& w_dot, const Vec& pg,
                                                         const std::vector<CorrectorBounds>& bounds,
                                                         std::span<const AreaParams> params);

class Simulator {
public:
    /// Throws ConfigError when the configuration does not validate.
    explicit Simulator(ScenarioConfig config, MonitorTolerances tolerances = {});

    struct StepOutput {
        PlantState plant;
        ControllerState controller;
        TrajectoryRecord record; ///< describes the state at t and the input held over the step
        std::vector<InfeasibilityEvent> events;
    };

    /// Advances one step of size dt from time t. Throws NumericalFailure on a
    /// non-finite state.
    [[nodiscard]] StepOutput step(const PlantState& plant, const ControllerState& ctrl, double t) const;

    /// Record of a state without advancing it (used for the final sample).
    [[nodiscard]] TrajectoryRecord observe(const PlantState& plant, const ControllerState& ctrl, double t) const;

    using Observer = std::function<void(const TrajectoryRecord&)>;

    /// Runs to t_end. `observer`, when given, sees every record before
    /// decimation.
    [[nodiscard]] RunResult run(const Observer& observer = {}) const;

    [[nodiscard]] const ScenarioConfig& config() const { return config_; }
    [[nodiscard]] const Network& network() const { return net_; }
    [[nodiscard]] std::size_t step_count() const;
    [[nodiscard]] double time_at(std::size_t k) const { return static_cast<double>(k) * config_.sim.dt; }

    /// Parameters the plant sees at t and those the controller acts on.
    [[nodiscard]] std::vector<AreaParams> plant_params(double t) const;
    [[nodiscard]] std::vector<AreaParams> controller_params(double t) const;

private:
    struct Field;
    [[nodiscard]] Field evaluate(const PlantState& plant, const ControllerState& ctrl, double t) const;

    ScenarioConfig config_;
    MonitorTolerances tol_;
    Network net_;
    Vec cap_lo_;
    Vec cap_hi_;
};

[[nodiscard]] RunResult run(const ScenarioConfig& config);

} // namespace safefc
