#include "safefc/projection.hpp"

#include <stdexcept>
#include <string>

namespace safefc {

namespace {

void require_same_size(const Vec& a, const Vec& b, const char* what)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument(std::string("size mismatch: ") + what);
    }
}

void require_in_box(const Vec& x, const Vec& lo, const Vec& hi, const char* what)
{
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x[i] >= lo[i] && x[i] <= hi[i])) {
            throw std::invalid_argument(std::string(what) + " component " + std::to_string(i) +
                                        " lies outside the box");
        }
    }
}

} // namespace

Vec project_field(const Vec& u, const Vec& x, const Vec& lo, const Vec& hi)
{
    require_same_size(u, x, "field and point");
    require_same_size(x, lo, "point and lower bound");
    require_same_size(x, hi, "point and upper bound");
    require_in_box(x, lo, hi, "point");
    Vec out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        out[i] = project_component(u[i], x[i], lo[i], hi[i]);
    }
    return out;
}

Vec clamp_point(const Vec& x, const Vec& lo, const Vec& hi)
{
    require_same_size(x, lo, "point and lower bound");
    require_same_size(x, hi, "point and upper bound");
    return x.cwiseMax(lo).cwiseMin(hi);
}

NormalConeResiduals check_normal_cone_inequalities(const Vec& f_at_x, const Vec& f_at_xe, const Vec& x,
                                                   const Vec& x_e, const Vec& lo, const Vec& hi)
{
    require_same_size(f_at_xe, x, "equilibrium field and point");
    require_same_size(x_e, x, "equilibrium and point");
    require_in_box(x_e, lo, hi, "equilibrium");
    const Vec projected = project_field(f_at_x, x, lo, hi);
    const Vec dx = x - x_e;
    return {dx.dot(projected) - dx.dot(f_at_x), dx.dot(f_at_xe)};
}

} // namespace safefc
