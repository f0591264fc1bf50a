#include "safefc/scenarios.hpp"

#include <algorithm>
#include <array>
#include <random>

namespace safefc::scenarios {

namespace {

LoadSignal constant(double v)
{
    return {LoadMode::StepHold, {{0.0, v}}};
}

LoadSignal step_at(double t, double v)
{
    return {LoadMode::StepHold, {{0.0, 0.0}, {t, v}}};
}

LoadSignal ramps(std::vector<LoadBreakpoint> points)
{
    return {LoadMode::LinearInterpolate, std::move(points)};
}

ScenarioConfig base(std::string name)
{
    ScenarioConfig c;
    c.name = std::move(name);
    c.topology = default_topology();
    c.areas = default_areas();
    const auto n = static_cast<Eigen::Index>(c.areas.size());
    c.initial_plant = {Vec::Zero(n - 1), Vec::Zero(n)};
    c.initial_controller = {Vec::Zero(n), Vec::Zero(n)};
    return c;
}

// Controller at rest for zero load: P^r = 0, ξ = −b.
void start_at_rest(ScenarioConfig& c)
{
    for (std::size_t i = 0; i < c.areas.size(); ++i) {
        c.initial_controller.xi[static_cast<Eigen::Index>(i)] = -c.areas[i].cost_lin;
    }
}

} // namespace

Topology default_topology()
{
    return {3, {{0, 1, 10.0, 10.0}, {1, 2, 10.0, 10.0}, {0, 2, 10.0, 10.0}}};
}

std::vector<AreaParams> default_areas()
{
    const double band = 0.1 / 50.0;
    // Capacities are deviations from the pre-disturbance setpoints
    // 7.4 / 0.7 / 1.5 p.u. of absolute ranges [7.2, 8.8], [0.5, 1.5], [1.3, 2.7].
    return {
        {10.0, 1.0, 1.0, 10.0, -0.2, 1.4, -band, band, 2.0, 7.4},
        {8.0, 1.0, 2.0, 12.0, -0.2, 0.8, -band, band, 2.0, 0.7},
        {6.0, 1.0, 1.5, 11.0, -0.2, 1.2, -band, band, 2.0, 1.5},
    };
}

ScenarioConfig s1_step()
{
    auto c = base("s1_step");
    c.load.signals = {step_at(10.0, 0.8), step_at(10.0, 0.5), step_at(10.0, 0.7)};
    c.sim.t_end = 200.0;
    c.sim.decimate = 10;
    start_at_rest(c);
    return c;
}

ScenarioConfig s2_restore()
{
    auto c = base("s2_restore");
    c.load.signals = {constant(0.8), constant(0.5), constant(0.7)};
    c.initial_plant.w.setConstant(hz_to_pu(49.8, 50.0));
    c.sim.t_end = 100.0;
    c.sim.decimate = 10;
    return c;
}

ScenarioConfig s3_timevarying(std::uint64_t seed)
{
    auto c = base("s3_timevarying");
    c.seed = seed;
    // Renewable output in area 2 offsets most of the load swings elsewhere.
    // Area 3 doubles its net load between 300 s and 400 s. On top sits a
    // fast 0.08 p.u. rise at 30 s, held until 730.5 s, then ramped out.
    const std::vector<double> times{0, 60, 150, 240, 300, 400, 480, 570, 690, 780, 840};
    const std::vector<std::vector<double>> values{
        {0, 0, 0.20, 0.30, 0.05, 0.00, 0.05, 0.20, 0.12, 0.05, 0},
        {0, 0, -0.12, -0.17, -0.15, -0.15, -0.12, -0.13, -0.19, -0.08, 0},
        {0, 0, -0.05, -0.10, 0.08, 0.16, 0.10, -0.05, 0.10, 0.05, 0},
    };
    const std::array<double, 3> step{0.032, 0.024, 0.024};
    const std::array<double, 4> edge{30.0, 30.5, 730.5, 830.5};
    std::vector<double> grid = times;
    grid.insert(grid.end(), edge.begin(), edge.end());
    std::sort(grid.begin(), grid.end());
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::vector<LoadBreakpoint> points;
        for (const double t : grid) {
            const auto k = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
            double v = values[i].back();
            if (k < times.size()) {
                const double s = (t - times[k - 1]) / (times[k] - times[k - 1]);
                v = values[i][k - 1] + s * (values[i][k] - values[i][k - 1]);
            }
            double bump = 0.0;
            if (t >= edge[1] && t <= edge[2]) {
                bump = 1.0;
            } else if (t > edge[2] && t < edge[3]) {
                bump = (edge[3] - t) / (edge[3] - edge[2]);
            }
            points.push_back({t, v + step[i] * bump});
        }
        c.load.signals.push_back(ramps(std::move(points)));
    }
    c.load.prediction_error_factor = 1.05;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> factor(0.95, 1.05);
    std::uniform_real_distribution<double> gap(30.0, 50.0);
    for (std::size_t area = 0; area < c.areas.size(); ++area) {
        for (double t = gap(rng); t < 900.0; t += gap(rng)) {
            c.schedule.push_back({t, area, ParamField::Damping, factor(rng)});
        }
    }
    c.schedule.push_back({300.0, 0, ParamField::Inertia, 0.8});
    c.schedule.push_back({450.0, 1, ParamField::Inertia, 1.5});
    c.schedule.push_back({600.0, 2, ParamField::Inertia, 0.6});

    c.sim.t_end = 900.0;
    c.sim.decimate = 100;
    start_at_rest(c);
    return c;
}

std::vector<std::string> names()
{
    return {"s1_step", "s2_restore", "s3_timevarying"};
}

std::optional<ScenarioConfig> find(std::string_view name)
{
    if (name == "s1_step") {
        return s1_step();
    }
    if (name == "s2_restore") {
        return s2_restore();
    }
    if (name == "s3_timevarying") {
        return s3_timevarying();
    }
    return std::nullopt;
}

} // namespace safefc::scenarios
