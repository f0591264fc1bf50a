#include "safefc/control.hpp"

#include "safefc/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace safefc {

FoDerivative fo_rhs(const ControllerState& ctrl, const Vec& w, const Vec& d_view,
                    std::span<const AreaParams> params)
{
    const auto n = ctrl.pg_ref.size();
    if (ctrl.xi.size() != n || w.size() != n || d_view.size() != n ||
        static_cast<Eigen::Index>(params.size()) != n) {
        throw std::invalid_argument("fo_rhs: inconsistent vector lengths");
    }
    FoDerivative out{Vec(n), Vec(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& a = params[static_cast<std::size_t>(i)];
        out.pg_ref_raw[i] = -a.cost_quad * ctrl.pg_ref[i] - a.cost_lin - ctrl.xi[i] - w[i];
        out.xi_dot[i] = ctrl.pg_ref[i] - d_view[i];
    }
    return out;
}

FoDerivative fo_projected_rhs(const ControllerState& ctrl, const Vec& w, const Vec& d_view,
                              std::span<const AreaParams> params)
{
    auto out = fo_rhs(ctrl, w, d_view, params);
    out.pg_ref_raw = project_field(out.pg_ref_raw, ctrl.pg_ref, cap_lo_vec(params), cap_hi_vec(params));
    return out;
}

CorrectorBounds corrector_bounds(double w, double d_view, double tie_flow_sum, const AreaParams& params)
{
    const double balance = params.damping * w + d_view + tie_flow_sum;
    const double stiffness = params.cbf_gain * params.inertia;
    CorrectorBounds b;
    b.l_raw = balance + stiffness * (params.freq_lo - w);
    b.u_raw = balance - stiffness * (w - params.freq_hi);
    b.cap_lo = params.cap_lo;
    b.cap_hi = params.cap_hi;
    b.lb = std::max(params.cap_lo, b.l_raw);
    b.ub = std::min(params.cap_hi, b.u_raw);
    b.feasible = b.lb <= b.ub;
    return b;
}

double corrector_apply(double pg_ref, const CorrectorBounds& bounds)
{
    if (bounds.feasible) {
        return std::min(std::max(pg_ref, bounds.lb), bounds.ub);
    }
    const double mid = 0.5 * (bounds.l_raw + bounds.u_raw);
    return std::min(std::max(mid, bounds.cap_lo), bounds.cap_hi);
}

ControlAction compute_control(ControllerMode mode, const Vec& pg_ref, const Vec& w, const Vec& d_view,
                              const Vec& tie_flow_sums, std::span<const AreaParams> params)
{
    const auto n = pg_ref.size();
    if (w.size() != n || d_view.size() != n || tie_flow_sums.size() != n ||
        static_cast<Eigen::Index>(params.size()) != n) {
        throw std::invalid_argument("compute_control: inconsistent vector lengths");
    }
    ControlAction action{Vec(n), {}};
    action.bounds.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& a = params[static_cast<std::size_t>(i)];
        action.bounds.push_back(corrector_bounds(w[i], d_view[i], tie_flow_sums[i], a));
        action.pg[i] = mode == ControllerMode::FoCbf ? corrector_apply(pg_ref[i], action.bounds.back())
                                                     : baseline_apply(pg_ref[i]);
    }
    return action;
}

double corrector_lipschitz_constant(const AreaParams& params, double coupling_row_norm)
{
    return std::max({1.0, std::abs(params.damping - params.cbf_gain * params.inertia), coupling_row_norm});
}

} // namespace safefc
