#pragma once

// Right-hand sides of the area swing dynamics.

#include "safefc/graph.hpp"
#include "safefc/model.hpp"

#include <span>

namespace safefc {

struct PlantDerivative {
    Vec alpha_dot;
    Vec w_dot;
};

/// α̇ = T w,  M ẇ = −D w + P_g − d − F B F̃ᵀ α.
[[nodiscard]] PlantDerivative linear_rhs(const PlantState& state, const Vec& pg, const Vec& d,
                                         std::span<const AreaParams> params, const Network& net);

/// α̇ = T w,  M ẇ = −D w + P_g − d − F B̂ sin(F̃ᵀ α).
[[nodiscard]] PlantDerivative nonlinear_rhs(const PlantState& state, const Vec& pg, const Vec& d,
                                            std::span<const AreaParams> params, const Network& net);

[[nodiscard]] PlantDerivative plant_rhs(PlantMode mode, const PlantState& state, const Vec& pg,
                                        const Vec& d, std::span<const AreaParams> params,
                                        const Network& net);

/// ẇ given the net outgoing tie-line power of each area.
[[nodiscard]] Vec frequency_rate(const Vec& w, const Vec& pg, const Vec& d, const Vec& tie_sums,
                                 std::span<const AreaParams> params);

} // namespace safefc
