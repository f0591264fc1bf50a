#pragma once

// Two-layer area controller: the projected-gradient reference generator and
// the closed-form barrier-function safety corrector. Everything here is
// decentralized; area i only touches its own measurements.

#include "safefc/model.hpp"

#include <span>

namespace safefc {

struct FoDerivative {
    Vec pg_ref_raw; ///< −a P^r − b − ξ − w, before projection on the capacity box
    Vec xi_dot;     ///< P^r − d
};

[[nodiscard]] FoDerivative fo_rhs(const ControllerState& ctrl, const Vec& w, const Vec& d_view,
                                  std::span<const AreaParams> params);

/// fo_rhs with the reference rate projected against [cap_lo, cap_hi].
[[nodiscard]] FoDerivative fo_projected_rhs(const ControllerState& ctrl, const Vec& w,
                                            const Vec& d_view, std::span<const AreaParams> params);

/// Admissible interval for the applied power of one area.
///
/// The raw bounds come from enforcing ẇ ≥ β(w_lo − w) and ẇ ≤ −β(w − w_hi)
/// through the swing equation; the effective bounds intersect them with the
/// capacity box.
struct CorrectorBounds {
    double l_raw = 0.0;
    double u_raw = 0.0;
    double lb = 0.0;
    double ub = 0.0;
    double cap_lo = 0.0;
    double cap_hi = 0.0;
    bool feasible = true;
};

/// `tie_flow_sum` is the measured net power leaving the area over its
/// tie-lines.
[[nodiscard]] CorrectorBounds corrector_bounds(double w, double d_view, double tie_flow_sum,
                                               const AreaParams& params);

/// Minimal-deviation applied power: clamp of the reference into [lb, ub].
/// When the interval is empty the clamped midpoint of the raw interval is
/// used instead, so the capacity box always holds.
[[nodiscard]] double corrector_apply(double pg_ref, const CorrectorBounds& bounds);

/// Applies the reference unchanged (plain feedback optimization).
[[nodiscard]] inline double baseline_apply(double pg_ref) { return pg_ref; }

struct ControlAction {
    Vec pg;
    std::vector<CorrectorBounds> bounds;
};

/// Applied powers of all areas. Bounds are evaluated in both modes so they
/// can be monitored; only FoCbf acts on them.
[[nodiscard]] ControlAction compute_control(ControllerMode mode, const Vec& pg_ref, const Vec& w,
                                            const Vec& d_view, const Vec& tie_flow_sums,
                                            std::span<const AreaParams> params);

/// Lipschitz constant of the corrector output of one area with respect to
/// (P^r_i, w_i, α): max{1, |D − βM|, ‖[F B F̃ᵀ]_i‖}.
[[nodiscard]] double corrector_lipschitz_constant(const AreaParams& params, double coupling_row_norm);

} // namespace safefc
