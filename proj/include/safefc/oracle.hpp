#pragma once

// Ground truth that does not go through the simulator: the steady-state
// economic dispatch, the closed-loop equilibrium, and a search-based solver
// for the corrector QP.

#include "safefc/graph.hpp"
#include "safefc/model.hpp"

#include <span>
#include <stdexcept>

namespace safefc {

class InfeasibleDispatch : public std::runtime_error {
public:
    InfeasibleDispatch(const std::string& what, std::vector<std::size_t> areas)
        : std::runtime_error(what), areas_(std::move(areas))
    {
    }

    [[nodiscard]] const std::vector<std::size_t>& areas() const { return areas_; }

private:
    std::vector<std::size_t> areas_;
};

struct SteadyStateSolution {
    Vec power;
    Vec multiplier;
    double cost = 0.0;
    /// Areas whose load sits exactly on a capacity bound. The multiplier
    /// reported there is the selection with zero box multiplier; it is not
    /// unique.
    std::vector<bool> on_boundary;
};

/// min Σ ½a P² + bP  s.t. P = d, cap_lo ≤ P ≤ cap_hi.
/// Throws InfeasibleDispatch naming every area with d outside its box.
[[nodiscard]] SteadyStateSolution solve_steady_qp(const Vec& d, std::span<const AreaParams> params);

[[nodiscard]] double generation_cost(const Vec& pg, std::span<const AreaParams> params);

struct KktResidual {
    double stationarity = 0.0; ///< max |[−aP − b − ξ]_proj|
    double primal = 0.0;       ///< max |P − d|, plus box violation
};

[[nodiscard]] KktResidual kkt_residual(const Vec& power, const Vec& multiplier, const Vec& d,
                                       std::span<const AreaParams> params);

struct Equilibrium {
    Vec alpha;
    Vec w;
    Vec pg_ref;
    Vec xi;

    [[nodiscard]] PlantState plant() const { return {alpha, w}; }
    [[nodiscard]] ControllerState controller() const { return {pg_ref, xi}; }
};

/// Closed-loop equilibrium for a constant load: w = 0, P^r = P*, ξ = ξ*,
/// and α solving F B F̃ᵀ α = P^r − d.
[[nodiscard]] Equilibrium equilibrium(const Vec& d, std::span<const AreaParams> params, const Network& net);

/// argmin ½(P − P^r)² over [lb, ub] by coarse-to-fine grid search down to
/// `resolution`, finished by comparing against both interval endpoints.
/// Throws std::invalid_argument when lb > ub.
[[nodiscard]] double corrector_qp_bruteforce(double pg_ref, double lb, double ub,
                                             double resolution = 1e-6);

} // namespace safefc
