#pragma once

// Box projection of vector fields, the operator behind the projected
// gradient dynamics of the reference generator.

#include "safefc/model.hpp"

namespace safefc {

/// Component of the projected field: zero when x sits on a bound and u points
/// outward, u otherwise. Bounds are detected by exact equality.
[[nodiscard]] inline double project_component(double u, double x, double lo, double hi)
{
    if ((x == lo && u <= 0.0) || (x == hi && u >= 0.0)) {
        return 0.0;
    }
    return u;
}

/// Component-wise projection of the field u at x onto the tangent cone of
/// [lo, hi]. Throws std::invalid_argument if x is outside the box or the
/// sizes disagree.
[[nodiscard]] Vec project_field(const Vec& u, const Vec& x, const Vec& lo, const Vec& hi);

/// min(max(x, lo), hi) per component.
[[nodiscard]] Vec clamp_point(const Vec& x, const Vec& lo, const Vec& hi);

struct NormalConeResiduals {
    double r1 = 0.0; ///< (x−x_e)ᵀ[f(x)]_proj − (x−x_e)ᵀ f(x), never positive
    double r2 = 0.0; ///< (x−x_e)ᵀ f(x_e), nonpositive at a projected-flow equilibrium
};

[[nodiscard]] NormalConeResiduals check_normal_cone_inequalities(const Vec& f_at_x, const Vec& f_at_xe,
                                                                 const Vec& x, const Vec& x_e,
                                                                 const Vec& lo, const Vec& hi);

} // namespace safefc
