#include "safefc/oracle.hpp"

#include "safefc/projection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace safefc {

double generation_cost(const Vec& pg, std::span<const AreaParams> params)
{
    double cost = 0.0;
    for (Eigen::Index i = 0; i < pg.size(); ++i) {
        const auto& a = params[static_cast<std::size_t>(i)];
        cost += 0.5 * a.cost_quad * pg[i] * pg[i] + a.cost_lin * pg[i];
    }
    return cost;
}

SteadyStateSolution solve_steady_qp(const Vec& d, std::span<const AreaParams> params)
{
    const auto n = d.size();
    if (static_cast<Eigen::Index>(params.size()) != n) {
        throw std::invalid_argument("solve_steady_qp: load and parameter counts differ");
    }
    std::vector<std::size_t> bad;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& a = params[static_cast<std::size_t>(i)];
        if (!(d[i] >= a.cap_lo && d[i] <= a.cap_hi)) {
            bad.push_back(static_cast<std::size_t>(i));
        }
    }
    if (!bad.empty()) {
        std::string msg = "steady-state dispatch infeasible: load outside capacity in area";
        for (auto i : bad) {
            msg += " " + std::to_string(i + 1);
        }
        throw InfeasibleDispatch(msg, bad);
    }

    // The balance constraint pins P = d; stationarity with an inactive box
    // then gives ξ = −a d − b.
    SteadyStateSolution sol;
    sol.power = d;
    sol.multiplier.resize(n);
    sol.on_boundary.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& a = params[static_cast<std::size_t>(i)];
        sol.multiplier[i] = -a.cost_quad * d[i] - a.cost_lin;
        sol.on_boundary[static_cast<std::size_t>(i)] = d[i] == a.cap_lo || d[i] == a.cap_hi;
    }
    sol.cost = generation_cost(sol.power, params);
    return sol;
}

KktResidual kkt_residual(const Vec& power, const Vec& multiplier, const Vec& d, std::span<const AreaParams> params)
{
    KktResidual r;
    for (Eigen::Index i = 0; i < power.size(); ++i) {
        const auto& a = params[static_cast<std::size_t>(i)];
        const double p = power[i];
        const double box_violation = std::max({0.0, a.cap_lo - p, p - a.cap_hi});
        r.primal = std::max({r.primal, std::abs(p - d[i]), box_violation});
        if (box_violation == 0.0) {
            const double g = -a.cost_quad * p - a.cost_lin - multiplier[i];
            r.stationarity = std::max(r.stationarity, std::abs(project_component(g, p, a.cap_lo, a.cap_hi)));
        }
    }
    return r;
}

Equilibrium equilibrium(const Vec& d, std::span<const AreaParams> params, const Network& net)
{
    const auto sol = solve_steady_qp(d, params);
    Equilibrium eq;
    eq.w = Vec::Zero(d.size());
    eq.pg_ref = sol.power;
    eq.xi = sol.multiplier;
    const Vec rhs = sol.power - d;
    if (net.coupling.cols() == 0) {
        eq.alpha = Vec(0);
    } else {
        eq.alpha = net.coupling.colPivHouseholderQr().solve(rhs);
    }
    return eq;
}

double corrector_qp_bruteforce(double pg_ref, double lb, double ub, double resolution)
{
    if (!(lb <= ub)) {
        throw std::invalid_argument("corrector_qp_bruteforce: empty interval");
    }
    if (!(resolution > 0.0)) {
        throw std::invalid_argument("corrector_qp_bruteforce: resolution must be positive");
    }
    auto objective = [pg_ref](double p) { return 0.5 * (p - pg_ref) * (p - pg_ref); };

    constexpr int kGrid = 64;
    double lo = lb;
    double hi = ub;
    double best = lb;
    double best_val = objective(lb);
    for (;;) {
        const double h = (hi - lo) / kGrid;
        for (int k = 0; k <= kGrid; ++k) {
            const double p = k == kGrid ? hi : lo + h * k;
            const double v = objective(p);
            if (v < best_val) {
                best_val = v;
                best = p;
            }
        }
        if (h <= resolution) {
            break;
        }
        lo = std::max(lb, best - h);
        hi = std::min(ub, best + h);
    }
    for (double endpoint : {lb, ub}) {
        if (objective(endpoint) <= best_val) {
            best_val = objective(endpoint);
            best = endpoint;
        }
    }
    return best;
}

} // namespace safefc
