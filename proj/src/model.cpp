#include "safefc/model.hpp"

#include "safefc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace safefc {

double LoadSignal::at(double t) const
{
    if (points.empty()) {
        return 0.0;
    }
    if (t < points.front().time) {
        return points.front().value;
    }
    // First breakpoint strictly after t; the active segment starts just before it.
    auto next = std::upper_bound(points.begin(), points.end(), t,
                                 [](double time, const LoadBreakpoint& p) { return time < p.time; });
    if (next == points.end()) {
        return points.back().value;
    }
    const auto& left = *(next - 1);
    if (mode == LoadMode::StepHold) {
        return left.value;
    }
    const double span = next->time - left.time;
    const double s = (t - left.time) / span;
    return left.value + s * (next->value - left.value);
}

LoadSample load_at(const LoadProfile& profile, double t)
{
    const auto n = static_cast<Eigen::Index>(profile.signals.size());
    LoadSample sample{Vec(n), Vec(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        sample.plant[i] = profile.signals[static_cast<std::size_t>(i)].at(t);
    }
    sample.controller = sample.plant * profile.prediction_error_factor;
    return sample;
}

std::vector<AreaParams> params_at(std::span<const AreaParams> base, const ParameterSchedule& schedule,
                                  double t)
{
    std::vector<AreaParams> out(base.begin(), base.end());
    const auto n = base.size();
    // Latest activation per (area, field); index into schedule, -1 = none.
    std::vector<std::ptrdiff_t> inertia_src(n, -1);
    std::vector<std::ptrdiff_t> damping_src(n, -1);
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const auto& o = schedule[k];
        if (o.area >= n) {
            throw std::invalid_argument("parameter override references area " + std::to_string(o.area + 1) +
                                        " of " + std::to_string(n));
        }
        if (o.time > t) {
            continue;
        }
        auto& slot = o.field == ParamField::Inertia ? inertia_src[o.area] : damping_src[o.area];
        if (slot < 0 || schedule[static_cast<std::size_t>(slot)].time <= o.time) {
            slot = static_cast<std::ptrdiff_t>(k);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (inertia_src[i] >= 0) {
            out[i].inertia = base[i].inertia * schedule[static_cast<std::size_t>(inertia_src[i])].factor;
        }
        if (damping_src[i] >= 0) {
            out[i].damping = base[i].damping * schedule[static_cast<std::size_t>(damping_src[i])].factor;
        }
        if (!(out[i].inertia > 0.0) || !(out[i].damping > 0.0)) {
            throw std::invalid_argument("schedule makes inertia or damping of area " + std::to_string(i + 1) +
                                        " nonpositive");
        }
    }
    return out;
}

bool schedule_constant_on(const ParameterSchedule& schedule, double t0, double t1)
{
    return std::none_of(schedule.begin(), schedule.end(),
                        [&](const ParameterOverride& o) { return o.time > t0 && o.time <= t1; });
}

Vec cap_lo_vec(std::span<const AreaParams> areas)
{
    Vec v(static_cast<Eigen::Index>(areas.size()));
    for (std::size_t i = 0; i < areas.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = areas[i].cap_lo;
    }
    return v;
}

Vec cap_hi_vec(std::span<const AreaParams> areas)
{
    Vec v(static_cast<Eigen::Index>(areas.size()));
    for (std::size_t i = 0; i < areas.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = areas[i].cap_hi;
    }
    return v;
}

namespace {

void check_area(std::vector<std::string>& issues, std::size_t i, const AreaParams& a)
{
    const std::string tag = "area " + std::to_string(i + 1) + ": ";
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            issues.push_back(tag + name + " must be positive");
        }
    };
    positive(a.inertia, "inertia");
    positive(a.damping, "damping");
    positive(a.cost_quad, "cost_quad");
    positive(a.cost_lin, "cost_lin");
    positive(a.cbf_gain, "cbf_gain");
    if (!(a.cap_lo <= a.cap_hi)) {
        issues.push_back(tag + "cap_lo must not exceed cap_hi");
    }
    if (!(a.freq_lo < 0.0)) {
        issues.push_back(tag + "freq_lo must be negative");
    }
    if (!(a.freq_hi > 0.0)) {
        issues.push_back(tag + "freq_hi must be positive");
    }
}

void check_vector(std::vector<std::string>& issues, const Vec& v, std::size_t expected, const char* name)
{
    if (static_cast<std::size_t>(v.size()) != expected) {
        issues.push_back(std::string("initial ") + name + " has length " + std::to_string(v.size()) +
                         ", expected " + std::to_string(expected));
    } else if (!v.allFinite()) {
        issues.push_back(std::string("initial ") + name + " has non-finite entries");
    }
}

} // namespace

ValidationReport validate(const ScenarioConfig& config)
{
    ValidationReport report;
    auto& issues = report.issues;
    const std::size_t n = config.topology.n_areas;

    for (auto& msg : topology_issues(config.topology)) {
        issues.push_back("topology: " + msg);
    }
    if (config.areas.size() != n) {
        issues.push_back("expected " + std::to_string(n) + " areas, got " + std::to_string(config.areas.size()));
    }
    for (std::size_t i = 0; i < config.areas.size(); ++i) {
        check_area(issues, i, config.areas[i]);
    }

    if (config.load.signals.size() != n) {
        issues.push_back("load has " + std::to_string(config.load.signals.size()) + " signals, expected " +
                         std::to_string(n));
    }
    for (std::size_t i = 0; i < config.load.signals.size(); ++i) {
        const auto& pts = config.load.signals[i].points;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            if (!std::isfinite(pts[k].time) || !std::isfinite(pts[k].value)) {
                issues.push_back("load signal " + std::to_string(i + 1) + " has a non-finite breakpoint");
            }
            if (k > 0 && !(pts[k].time > pts[k - 1].time)) {
                issues.push_back("load signal " + std::to_string(i + 1) +
                                 ": breakpoint times must be strictly increasing");
                break;
            }
        }
    }
    if (!(config.load.prediction_error_factor > 0.0)) {
        issues.push_back("prediction_error_factor must be positive");
    }

    for (const auto& o : config.schedule) {
        if (o.area >= n) {
            issues.push_back("schedule references unknown area " + std::to_string(o.area + 1));
        }
        if (!(o.factor > 0.0)) {
            issues.push_back("schedule factor for area " + std::to_string(o.area + 1) +
                             " must be positive (inertia and damping stay positive)");
        }
    }

    const auto& sim = config.sim;
    if (!(sim.dt > 0.0)) {
        issues.push_back("dt must be positive");
    }
    if (!(sim.t_end >= sim.dt)) {
        issues.push_back("t_end must be at least dt");
    }
    if (sim.decimate == 0) {
        issues.push_back("decimate must be at least 1");
    }
    if (!(sim.nominal_hz > 0.0)) {
        issues.push_back("nominal_hz must be positive");
    }

    const std::size_t n_alpha = n > 0 ? n - 1 : 0;
    check_vector(issues, config.initial_plant.alpha, n_alpha, "alpha");
    check_vector(issues, config.initial_plant.w, n, "w");
    check_vector(issues, config.initial_controller.pg_ref, n, "pg_ref");
    check_vector(issues, config.initial_controller.xi, n, "xi");

    if (static_cast<std::size_t>(config.initial_controller.pg_ref.size()) == n && config.areas.size() == n) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = config.initial_controller.pg_ref[static_cast<Eigen::Index>(i)];
            const auto& a = config.areas[i];
            if (p < a.cap_lo || p > a.cap_hi) {
                issues.push_back("area " + std::to_string(i + 1) +
                                 ": inadmissible initial reference, pg_ref outside [cap_lo, cap_hi]");
            }
        }
    }
    return report;
}

} // namespace safefc
