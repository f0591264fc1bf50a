#include "safefc/sim.hpp"

#include "safefc/plant.hpp"
#include "safefc/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace safefc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool all_finite(const PlantState& p, const ControllerState& c)
{
    return p.alpha.allFinite() && p.w.allFinite() && c.pg_ref.allFinite() && c.xi.allFinite();
}

} // namespace

double lyapunov(const PlantState& plant, const ControllerState& ctrl, const Equilibrium& eq,
                std::span<const AreaParams> params, const Network& net)
{
    const Vec da = plant.alpha - eq.alpha;
    const Vec dw = plant.w - eq.w;
    double kinetic = 0.0;
    for (Eigen::Index i = 0; i < dw.size(); ++i) {
        kinetic += params[static_cast<std::size_t>(i)].inertia * dw[i] * dw[i];
    }
    return 0.5 * da.dot(net.reduced_laplacian * da) + 0.5 * kinetic +
           0.5 * (ctrl.pg_ref - eq.pg_ref).squaredNorm() + 0.5 * (ctrl.xi - eq.xi).squaredNorm();
}

std::vector<AreaMonitor> evaluate_monitors(const Vec& w, const Vec& w_dot, const Vec& pg,
                                           const std::vector<CorrectorBounds>& bounds,
                                           std::span<const AreaParams> params)
{
    std::vector<AreaMonitor> out(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        const auto& a = params[i];
        auto& m = out[i];
        m.safety_margin = std::min(w[k] - a.freq_lo, a.freq_hi - w[k]);
        m.capacity_margin = std::min(pg[k] - a.cap_lo, a.cap_hi - pg[k]);
        m.cbf_residual_lo = bounds[i].l_raw - pg[k];
        m.cbf_residual_hi = pg[k] - bounds[i].u_raw;
        m.w_dot = w_dot[k];
        if (w[k] > a.freq_hi) {
            m.monotone = w_dot[k] <= 0.0;
        } else if (w[k] < a.freq_lo) {
            m.monotone = w_dot[k] >= 0.0;
        } else {
            m.monotone = true;
        }
    }
    return out;
}

bool InvariantReport::ok() const
{
    return safety_violations == 0 && capacity_violations == 0 && monotonicity_violations == 0 &&
           dissipation_violations == 0 && cbf_residual_violations == 0 && infeasibility_events == 0;
}

std::vector<std::string> InvariantReport::failures() const
{
    std::vector<std::string> out;
    auto add = [&](std::size_t count, const char* what) {
        if (count > 0) {
            out.push_back(std::to_string(count) + " " + what);
        }
    };
    add(safety_violations, "frequency band violations after entry");
    add(capacity_violations, "capacity violations");
    add(monotonicity_violations, "out-of-band records moving away from the band");
    add(dissipation_violations, "Lyapunov increases beyond tolerance");
    add(cbf_residual_violations, "barrier constraint residuals above tolerance");
    add(infeasibility_events, "infeasible corrector instants");
    return out;
}

struct Simulator::Field {
    LoadSample load;
    std::vector<AreaParams> plant_params;
    std::vector<AreaParams> ctrl_params;
    Vec edge_flows;
    ControlAction action;
    PlantDerivative plant_dot;
    FoDerivative fo_dot;
};

Simulator::Simulator(ScenarioConfig config, MonitorTolerances tolerances)
    : config_(std::move(config)), tol_(tolerances)
{
    if (auto report = validate(config_); !report.ok()) {
        std::string msg = "invalid scenario '" + config_.name + "':";
        for (auto& issue : report.issues) {
            msg += "\n  - " + issue;
        }
        throw ConfigError(msg);
    }
    net_ = make_network(config_.topology);
    cap_lo_ = cap_lo_vec(config_.areas);
    cap_hi_ = cap_hi_vec(config_.areas);
}

std::size_t Simulator::step_count() const
{
    return static_cast<std::size_t>(std::llround(config_.sim.t_end / config_.sim.dt));
}

std::vector<AreaParams> Simulator::plant_params(double t) const
{
    return params_at(config_.areas, config_.schedule, t);
}

std::vector<AreaParams> Simulator::controller_params(double t) const
{
    if (config_.sim.controller_tracks_schedule) {
        return plant_params(t);
    }
    return config_.areas;
}

Simulator::Field Simulator::evaluate(const PlantState& plant, const ControllerState& ctrl, double t) const
{
    Field f;
    f.load = load_at(config_.load, t);
    f.plant_params = plant_params(t);
    f.ctrl_params = controller_params(t);
    f.edge_flows = measured_edge_flows(net_, plant.alpha, config_.sim.plant_mode);
    const Vec tie_sums = area_flow_sums(net_.mats, f.edge_flows);
    f.action = compute_control(config_.sim.controller_mode, ctrl.pg_ref, plant.w, f.load.controller, tie_sums,
                               f.ctrl_params);
    f.plant_dot.alpha_dot = net_.mats.difference * plant.w;
    f.plant_dot.w_dot = frequency_rate(plant.w, f.action.pg, f.load.plant, tie_sums, f.plant_params);
    f.fo_dot = fo_rhs(ctrl, plant.w, f.load.controller, f.ctrl_params);
    f.fo_dot.pg_ref_raw = project_field(f.fo_dot.pg_ref_raw, ctrl.pg_ref, cap_lo_, cap_hi_);
    return f;
}

namespace {

struct Snapshot {
    PlantState plant;
    ControllerState ctrl;
};

} // namespace

Simulator::StepOutput Simulator::step(const PlantState& plant, const ControllerState& ctrl, double t) const
{
    const double dt = config_.sim.dt;
    const Field k1 = evaluate(plant, ctrl, t);

    auto advance = [&](double h, const Field& f) {
        Snapshot s{{plant.alpha + h * f.plant_dot.alpha_dot, plant.w + h * f.plant_dot.w_dot},
                   {clamp_point(ctrl.pg_ref + h * f.fo_dot.pg_ref_raw, cap_lo_, cap_hi_),
                    ctrl.xi + h * f.fo_dot.xi_dot}};
        return s;
    };

    Snapshot next;
    if (config_.sim.integrator == Integrator::Euler) {
        next = advance(dt, k1);
    } else {
        const auto s2 = advance(0.5 * dt, k1);
        const Field k2 = evaluate(s2.plant, s2.ctrl, t + 0.5 * dt);
        const auto s3 = advance(0.5 * dt, k2);
        const Field k3 = evaluate(s3.plant, s3.ctrl, t + 0.5 * dt);
        const auto s4 = advance(dt, k3);
        const Field k4 = evaluate(s4.plant, s4.ctrl, t + dt);
        auto combine = [dt](const Vec& a, const Vec& b, const Vec& c, const Vec& d) -> Vec {
            return (dt / 6.0) * (a + 2.0 * b + 2.0 * c + d);
        };
        next.plant.alpha = plant.alpha + combine(k1.plant_dot.alpha_dot, k2.plant_dot.alpha_dot,
                                                 k3.plant_dot.alpha_dot, k4.plant_dot.alpha_dot);
        next.plant.w = plant.w + combine(k1.plant_dot.w_dot, k2.plant_dot.w_dot, k3.plant_dot.w_dot,
                                         k4.plant_dot.w_dot);
        next.ctrl.pg_ref = clamp_point(ctrl.pg_ref + combine(k1.fo_dot.pg_ref_raw, k2.fo_dot.pg_ref_raw,
                                                             k3.fo_dot.pg_ref_raw, k4.fo_dot.pg_ref_raw),
                                       cap_lo_, cap_hi_);
        next.ctrl.xi = ctrl.xi + combine(k1.fo_dot.xi_dot, k2.fo_dot.xi_dot, k3.fo_dot.xi_dot, k4.fo_dot.xi_dot);
    }

    if (!all_finite(next.plant, next.ctrl)) {
        std::ostringstream msg;
        msg << "non-finite state after the step from t = " << t << " s";
        throw NumericalFailure(msg.str());
    }

    StepOutput out;
    out.record.t = t;
    out.record.plant = plant;
    out.record.controller = ctrl;
    out.record.pg = k1.action.pg;
    out.record.d_true = k1.load.plant;
    out.record.d_view = k1.load.controller;
    out.record.edge_flows = k1.edge_flows;
    out.record.bounds = k1.action.bounds;
    out.record.monitors = evaluate_monitors(plant.w, k1.plant_dot.w_dot, k1.action.pg, k1.action.bounds,
                                            k1.plant_params);
    out.record.cost = generation_cost(k1.action.pg, k1.ctrl_params);

    out.record.lyapunov = kNaN;
    out.record.lyapunov_rate = kNaN;
    try {
        const Equilibrium eq = equilibrium(k1.load.plant, k1.plant_params, net_);
        const double v0 = lyapunov(plant, ctrl, eq, k1.plant_params, net_);
        const double v1 = lyapunov(next.plant, next.ctrl, eq, k1.plant_params, net_);
        out.record.lyapunov = v0;
        out.record.lyapunov_rate = (v1 - v0) / dt;
        const auto load_end = load_at(config_.load, t + dt).plant;
        const auto load_mid = load_at(config_.load, t + 0.5 * dt).plant;
        out.record.lyapunov_active = config_.sim.plant_mode == PlantMode::Linear &&
                                     config_.load.prediction_error_factor == 1.0 &&
                                     load_end == k1.load.plant && load_mid == k1.load.plant &&
                                     schedule_constant_on(config_.schedule, t, t + dt) &&
                                     k1.plant_params == k1.ctrl_params;
    } catch (const InfeasibleDispatch&) {
        out.record.lyapunov_active = false;
    }

    if (config_.sim.controller_mode == ControllerMode::FoCbf) {
        for (std::size_t i = 0; i < k1.action.bounds.size(); ++i) {
            if (!k1.action.bounds[i].feasible) {
                out.events.push_back({t, i});
            }
        }
    }
    out.plant = std::move(next.plant);
    out.controller = std::move(next.ctrl);
    return out;
}

TrajectoryRecord Simulator::observe(const PlantState& plant, const ControllerState& ctrl, double t) const
{
    const Field f = evaluate(plant, ctrl, t);
    TrajectoryRecord r;
    r.t = t;
    r.plant = plant;
    r.controller = ctrl;
    r.pg = f.action.pg;
    r.d_true = f.load.plant;
    r.d_view = f.load.controller;
    r.edge_flows = f.edge_flows;
    r.bounds = f.action.bounds;
    r.monitors = evaluate_monitors(plant.w, f.plant_dot.w_dot, f.action.pg, f.action.bounds, f.plant_params);
    r.cost = generation_cost(f.action.pg, f.ctrl_params);
    r.lyapunov_rate = kNaN;
    try {
        r.lyapunov = lyapunov(plant, ctrl, equilibrium(f.load.plant, f.plant_params, net_), f.plant_params, net_);
    } catch (const InfeasibleDispatch&) {
        r.lyapunov = kNaN;
    }
    return r;
}

namespace {

/// Folds every record into metrics and invariant counts.
class Accumulator {
public:
    Accumulator(const ScenarioConfig& cfg, const MonitorTolerances& tol)
        : cfg_(cfg), tol_(tol), n_(cfg.areas.size()), in_band_once_(n_, false)
    {
        metrics_.nadir_hz.assign(n_, std::numeric_limits<double>::infinity());
        metrics_.zenith_hz.assign(n_, -std::numeric_limits<double>::infinity());
    }

    void add(const TrajectoryRecord& r, double weight, bool model_exact)
    {
        const double hz = cfg_.sim.nominal_hz;
        const double settle_pu = cfg_.sim.settle_tol_hz / hz;
        bool any_outside = false;
        bool any_unsettled = false;
        for (std::size_t i = 0; i < n_; ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            const auto& a = cfg_.areas[i];
            const auto& m = r.monitors[i];
            const double w = r.plant.w[k];
            metrics_.nadir_hz[i] = std::min(metrics_.nadir_hz[i], to_hz(w, hz));
            metrics_.zenith_hz[i] = std::max(metrics_.zenith_hz[i], to_hz(w, hz));
            metrics_.max_rocof_hz_s = std::max(metrics_.max_rocof_hz_s, std::abs(m.w_dot) * hz);

            const bool outside = w < a.freq_lo || w > a.freq_hi;
            if (outside) {
                any_outside = true;
                ++metrics_.violation_count;
                const double excursion = std::max(a.freq_lo - w, w - a.freq_hi);
                metrics_.violation_integral_hz_s += excursion * hz * weight;
            } else {
                in_band_once_[i] = true;
            }
            if (std::abs(w) > settle_pu) {
                any_unsettled = true;
            }

            report_.worst_safety_margin = first_ ? m.safety_margin
                                                 : std::min(report_.worst_safety_margin, m.safety_margin);
            report_.worst_capacity_margin = first_ ? m.capacity_margin
                                                   : std::min(report_.worst_capacity_margin, m.capacity_margin);
            if (in_band_once_[i] && m.safety_margin < -tol_.safety_slack) {
                ++report_.safety_violations;
            }
            if (m.capacity_margin < 0.0) {
                ++report_.capacity_violations;
            }
            if (cfg_.sim.controller_mode == ControllerMode::FoCbf && r.bounds[i].feasible) {
                if (m.cbf_residual_lo > tol_.cbf_residual || m.cbf_residual_hi > tol_.cbf_residual) {
                    ++report_.cbf_residual_violations;
                }
                if (model_exact && !m.monotone) {
                    ++report_.monotonicity_violations;
                }
            }
        }
        if (first_) {
            metrics_.started_outside_band = any_outside;
        }
        track_streak(any_outside, r.t, outside_pending_, entry_time_);
        track_streak(any_unsettled, r.t, unsettled_pending_, settle_time_);

        if (r.lyapunov_active) {
            report_.max_active_lyapunov_rate = std::max(report_.max_active_lyapunov_rate, r.lyapunov_rate);
            if (r.lyapunov_rate > tol_.dissipation_base + tol_.dissipation_per_dt * cfg_.sim.dt) {
                ++report_.dissipation_violations;
            }
        }
        metrics_.final_cost = r.cost;
        ++report_.steps;
        first_ = false;
    }

    void add_events(std::size_t count) { report_.infeasibility_events += count; }

    Metrics finish(std::optional<double> residual)
    {
        if (metrics_.started_outside_band && !outside_pending_) {
            metrics_.safe_entry_time_s = entry_time_;
        }
        if (!unsettled_pending_) {
            metrics_.settling_time_s = settle_time_;
        }
        metrics_.steady_residual = residual;
        return metrics_;
    }

    [[nodiscard]] const InvariantReport& report() const { return report_; }

private:
    // `since` becomes the time of the first good record after the last bad one.
    static void track_streak(bool bad, double t, bool& pending, double& since)
    {
        if (bad) {
            pending = true;
        } else if (pending) {
            pending = false;
            since = t;
        }
    }

    const ScenarioConfig& cfg_;
    const MonitorTolerances& tol_;
    std::size_t n_;
    std::vector<bool> in_band_once_;
    Metrics metrics_;
    InvariantReport report_;
    bool first_ = true;
    bool outside_pending_ = false;
    double entry_time_ = 0.0;
    bool unsettled_pending_ = false;
    double settle_time_ = 0.0;
};

} // namespace

RunResult Simulator::run(const Observer& observer) const
{
    RunResult result;
    Accumulator acc(config_, tol_);
    const bool exact_load = config_.load.prediction_error_factor == 1.0;

    PlantState plant = config_.initial_plant;
    ControllerState ctrl = config_.initial_controller;
    const std::size_t n = step_count();
    const std::size_t decimate = config_.sim.decimate;
    result.records.reserve(n / decimate + 2);

    std::size_t k = 0;
    for (; k < n; ++k) {
        const double t = time_at(k);
        StepOutput out;
        try {
            out = step(plant, ctrl, t);
        } catch (const NumericalFailure& e) {
            result.status = RunStatus::NonFinite;
            result.message = e.what();
            break;
        }
        const bool model_exact = exact_load && (config_.schedule.empty() || config_.sim.controller_tracks_schedule ||
                                                plant_params(t) == config_.areas);
        acc.add(out.record, config_.sim.dt, model_exact);
        acc.add_events(out.events.size());
        result.events.insert(result.events.end(), out.events.begin(), out.events.end());
        if (observer) {
            observer(out.record);
        }
        if (k % decimate == 0) {
            result.records.push_back(std::move(out.record));
        }
        plant = std::move(out.plant);
        ctrl = std::move(out.controller);
    }

    if (result.status == RunStatus::Ok) {
        auto last = observe(plant, ctrl, time_at(n));
        const bool model_exact = exact_load && (config_.schedule.empty() || config_.sim.controller_tracks_schedule ||
                                                plant_params(last.t) == config_.areas);
        acc.add(last, 0.0, model_exact);
        if (observer) {
            observer(last);
        }
        result.records.push_back(std::move(last));
    }

    std::optional<double> residual;
    try {
        const auto d_final = load_at(config_.load, time_at(k)).plant;
        const auto eq = equilibrium(d_final, config_.areas, net_);
        Vec z(eq.alpha.size() + 3 * eq.w.size());
        Vec ze(z.size());
        z << plant.alpha, plant.w, ctrl.pg_ref, ctrl.xi;
        ze << eq.alpha, eq.w, eq.pg_ref, eq.xi;
        residual = (z - ze).norm();
    } catch (const InfeasibleDispatch&) {
        residual.reset();
    }
    result.metrics = acc.finish(residual);
    result.invariants = acc.report();
    return result;
}

RunResult run(const ScenarioConfig& config)
{
    return Simulator(config).run();
}

} // namespace safefc
