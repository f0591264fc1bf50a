#pragma once

#include "safefc/model.hpp"
#include "safefc/scenarios.hpp"

namespace test {

inline safefc::AreaParams unit_area(double band = 0.1)
{
    safefc::AreaParams a;
    a.inertia = 1.0;
    a.damping = 1.0;
    a.cost_quad = 1.0;
    a.cost_lin = 1.0;
    a.cap_lo = -10.0;
    a.cap_hi = 10.0;
    a.freq_lo = -band;
    a.freq_hi = band;
    a.cbf_gain = 1.0;
    return a;
}

/// One isolated area with constant load.
inline safefc::ScenarioConfig single_area(double w0, double load)
{
    safefc::ScenarioConfig c;
    c.name = "single";
    c.topology = {1, {}};
    c.areas = {unit_area()};
    c.load.signals = {{safefc::LoadMode::StepHold, {{0.0, load}}}};
    c.initial_plant = {safefc::Vec(0), safefc::Vec::Constant(1, w0)};
    c.initial_controller = {safefc::Vec::Constant(1, load), safefc::Vec::Zero(1)};
    c.sim.dt = 1e-3;
    c.sim.t_end = 1e-3;
    return c;
}

inline safefc::Vec vec(std::initializer_list<double> xs)
{
    safefc::Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) {
        v[i++] = x;
    }
    return v;
}

} // namespace test
