#include "catch_amalgamated.hpp"

#include "safefc/oracle.hpp"
#include "safefc/scenarios.hpp"
#include "safefc/sim.hpp"
#include "support.hpp"

#include <cmath>

using namespace safefc;
using test::vec;

namespace {

ScenarioConfig constant_load(Vec d)
{
    auto c = scenarios::s1_step();
    c.load.signals.clear();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        c.load.signals.push_back({LoadMode::StepHold, {{0.0, d[i]}}});
    }
    return c;
}

double state_distance(const PlantState& p, const ControllerState& c, const PlantState& q, const ControllerState& e)
{
    return std::max({(p.alpha - q.alpha).cwiseAbs().maxCoeff(), (p.w - q.w).cwiseAbs().maxCoeff(),
                     (c.pg_ref - e.pg_ref).cwiseAbs().maxCoeff(), (c.xi - e.xi).cwiseAbs().maxCoeff()});
}

} // namespace

TEST_CASE("one Euler step of an isolated damped area")
{
    auto c = test::single_area(0.1, 0.0);
    c.sim.controller_mode = ControllerMode::FoPlain;
    const Simulator sim(c);
    const auto out = sim.step(c.initial_plant, c.initial_controller, 0.0);
    CHECK(out.plant.w[0] == Catch::Approx(0.0999).epsilon(1e-14));
}

TEST_CASE("equilibrium is a fixed point")
{
    const Vec d = vec({0.8, 0.5, 0.7});
    auto c = constant_load(d);
    const Simulator sim(c);
    const auto eq = equilibrium(d, c.areas, sim.network());
    PlantState p = eq.plant();
    ControllerState k = eq.controller();
    for (int n = 0; n < 1000; ++n) {
        const auto out = sim.step(p, k, n * c.sim.dt);
        REQUIRE(state_distance(out.plant, out.controller, p, k) <= 1e-12);
        p = out.plant;
        k = out.controller;
    }
}

TEST_CASE("zero load keeps the system at rest")
{
    auto c = constant_load(Vec::Zero(3));
    c.sim.t_end = 5.0;
    const auto r = run(c);
    REQUIRE(r.status == RunStatus::Ok);
    for (const auto& rec : r.records) {
        REQUIRE(rec.plant.w.isZero(0.0));
        REQUIRE(rec.plant.alpha.isZero(0.0));
        REQUIRE(rec.pg.isZero(0.0));
        REQUIRE(rec.cost == 0.0);
    }
    CHECK(r.metrics.settling_time_s == 0.0);
    CHECK(r.metrics.violation_integral_hz_s == 0.0);
}

TEST_CASE("Euler is first order and RK4 is the sharper reference")
{
    auto c = scenarios::s1_step();
    c.load.signals = {{LoadMode::StepHold, {{0.0, 0.08}}},
                      {LoadMode::StepHold, {{0.0, 0.05}}},
                      {LoadMode::StepHold, {{0.0, 0.07}}}};
    c.sim.t_end = 2.0;
    auto end_state = [&](Integrator integ, double dt) {
        auto cc = c;
        cc.sim.integrator = integ;
        cc.sim.dt = dt;
        const auto r = run(cc);
        return r.records.back().plant.w;
    };
    const Vec ref = end_state(Integrator::Rk4, 1e-3);
    const double e1 = (end_state(Integrator::Euler, 2e-3) - ref).norm();
    const double e2 = (end_state(Integrator::Euler, 1e-3) - ref).norm();
    CHECK(e1 / e2 == Catch::Approx(2.0).margin(0.2));
    const double r1 = (end_state(Integrator::Rk4, 4e-3) - ref).norm();
    CHECK(r1 < e2 * 1e-3);
}

TEST_CASE("observer sees every step, records are decimated")
{
    auto c = scenarios::s1_step();
    c.sim.t_end = 1.0;
    c.sim.decimate = 100;
    std::size_t seen = 0;
    const auto r = Simulator(c).run([&](const TrajectoryRecord&) { ++seen; });
    CHECK(seen == 1001);
    CHECK(r.records.size() == 11);
    CHECK(r.records.back().t == 1.0);
    CHECK(std::isnan(r.records.back().lyapunov_rate));
    CHECK(r.invariants.steps == 1001);
}

TEST_CASE("runs are deterministic")
{
    auto c = scenarios::s3_timevarying();
    c.sim.t_end = 50.0;
    const auto a = run(c);
    const auto b = run(c);
    REQUIRE(a.records.size() == b.records.size());
    CHECK(a.records.back().plant.w == b.records.back().plant.w);
    CHECK(a.records.back().controller.xi == b.records.back().controller.xi);
}

TEST_CASE("divergence stops the run with a diagnostic")
{
    auto c = test::single_area(0.05, 0.0);
    c.areas[0].inertia = 1e-3;
    c.sim.controller_mode = ControllerMode::FoPlain;
    c.sim.dt = 10.0;
    c.sim.t_end = 1e4;
    const auto r = run(c);
    CHECK(r.status == RunStatus::NonFinite);
    CHECK_FALSE(r.message.empty());
    CHECK_FALSE(r.records.empty());
    for (const auto& rec : r.records) {
        CHECK(rec.plant.w.allFinite());
    }
}

TEST_CASE("invalid scenario is rejected at construction")
{
    auto c = scenarios::s1_step();
    c.sim.dt = -1.0;
    CHECK_THROWS_AS(Simulator(c), ConfigError);
}

TEST_CASE("Lyapunov function vanishes at equilibrium and is positive elsewhere")
{
    const Vec d = vec({0.8, 0.5, 0.7});
    const auto c = constant_load(d);
    const Simulator sim(c);
    const auto eq = equilibrium(d, c.areas, sim.network());
    CHECK(lyapunov(eq.plant(), eq.controller(), eq, c.areas, sim.network()) == 0.0);
    auto p = eq.plant();
    p.alpha[0] += 0.01;
    CHECK(lyapunov(p, eq.controller(), eq, c.areas, sim.network()) > 0.0);
}

TEST_CASE("monitors flag motion away from the band")
{
    const auto areas = scenarios::default_areas();
    const double hi = areas[0].freq_hi;
    std::vector<CorrectorBounds> b(3);
    const auto m = evaluate_monitors(vec({hi * 1.5, 0, -hi * 1.5}), vec({0.1, 0, 0.1}), Vec::Zero(3), b, areas);
    CHECK_FALSE(m[0].monotone);
    CHECK(m[1].monotone);
    CHECK(m[2].monotone);
    CHECK(m[0].safety_margin < 0.0);
}

TEST_CASE("out-of-band start reports an entry time")
{
    auto c = scenarios::s2_restore();
    c.sim.t_end = 40.0;
    const auto r = run(c);
    CHECK(r.metrics.started_outside_band);
    REQUIRE(r.metrics.safe_entry_time_s.has_value());
    CHECK(*r.metrics.safe_entry_time_s > 0.0);
    CHECK(r.invariants.monotonicity_violations == 0);
    CHECK(r.invariants.safety_violations == 0);

    auto in_band = scenarios::s1_step();
    in_band.sim.t_end = 5.0;
    CHECK_FALSE(run(in_band).metrics.safe_entry_time_s.has_value());
}

TEST_CASE("controller can track the parameter schedule")
{
    auto c = scenarios::s3_timevarying();
    c.sim.controller_tracks_schedule = true;
    const Simulator sim(c);
    CHECK(sim.controller_params(500.0) == sim.plant_params(500.0));
    c.sim.controller_tracks_schedule = false;
    const Simulator nominal(c);
    CHECK(nominal.controller_params(500.0) == c.areas);
    CHECK(nominal.plant_params(500.0)[1].inertia == Catch::Approx(1.5 * c.areas[1].inertia));
}
