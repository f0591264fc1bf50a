#include "safefc/plant.hpp"

#include <stdexcept>

namespace safefc {

Vec frequency_rate(const Vec& w, const Vec& pg, const Vec& d, const Vec& tie_sums,
                   std::span<const AreaParams> params)
{
    const auto n = w.size();
    if (pg.size() != n || d.size() != n || tie_sums.size() != n || static_cast<Eigen::Index>(params.size()) != n) {
        throw std::invalid_argument("frequency_rate: inconsistent vector lengths");
    }
    Vec w_dot(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& a = params[static_cast<std::size_t>(i)];
        w_dot[i] = (-a.damping * w[i] + pg[i] - d[i] - tie_sums[i]) / a.inertia;
    }
    return w_dot;
}

namespace {

PlantDerivative rhs_with_flows(const PlantState& state, const Vec& pg, const Vec& d,
                               std::span<const AreaParams> params, const Network& net, PlantMode mode)
{
    if (state.w.size() != static_cast<Eigen::Index>(net.n_areas())) {
        throw std::invalid_argument("plant state has wrong number of frequencies");
    }
    const Vec flows = measured_edge_flows(net, state.alpha, mode);
    return {net.mats.difference * state.w,
            frequency_rate(state.w, pg, d, area_flow_sums(net.mats, flows), params)};
}

} // namespace

PlantDerivative linear_rhs(const PlantState& state, const Vec& pg, const Vec& d,
                           std::span<const AreaParams> params, const Network& net)
{
    return rhs_with_flows(state, pg, d, params, net, PlantMode::Linear);
}

PlantDerivative nonlinear_rhs(const PlantState& state, const Vec& pg, const Vec& d,
                              std::span<const AreaParams> params, const Network& net)
{
    return rhs_with_flows(state, pg, d, params, net, PlantMode::Nonlinear);
}

PlantDerivative plant_rhs(PlantMode mode, const PlantState& state, const Vec& pg, const Vec& d,
                          std::span<const AreaParams> params, const Network& net)
{
    return rhs_with_flows(state, pg, d, params, net, mode);
}

} // namespace safefc
