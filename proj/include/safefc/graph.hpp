#pragma once

// Incidence algebra of the area graph.

#include "safefc/model.hpp"

#include <stdexcept>

namespace safefc {

class TopologyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct IncidenceMatrices {
    Mat full;       ///< F, N×M: +1 at the tail of each edge, −1 at the head
    Mat reduced;    ///< F̃, (N−1)×M: F without its last row
    Mat difference; ///< T = [I_{N−1}, −1], (N−1)×N
};

/// Structural problems (bad endpoints, self-loops, parallel lines,
/// nonpositive weights, disconnected graph). Empty means valid.
[[nodiscard]] std::vector<std::string> topology_issues(const Topology& topology);

[[nodiscard]] bool is_connected(const Topology& topology);

/// Throws TopologyError if the topology is invalid or disconnected.
[[nodiscard]] IncidenceMatrices build_incidence(const Topology& topology);

/// Topology plus everything derived from it that the dynamics need.
struct Network {
    Topology topology;
    IncidenceMatrices mats;
    Vec b_linear;
    Vec b_nonlinear;
    Mat coupling;          ///< F B_l F̃ᵀ, N×(N−1)
    Mat reduced_laplacian; ///< F̃ B_l F̃ᵀ, (N−1)×(N−1), SPD for connected graphs

    [[nodiscard]] std::size_t n_areas() const { return topology.n_areas; }
    [[nodiscard]] std::size_t n_lines() const { return topology.tie_lines.size(); }
};

[[nodiscard]] Network make_network(const Topology& topology);

/// φ = F B F̃ᵀ α: net tie-line power leaving each area.
[[nodiscard]] Vec net_tieline_power_linear(const IncidenceMatrices& mats, const Vec& weights,
                                           const Vec& alpha);

/// Per-edge flows, B_e δ_e (linear) or B̂_e sin δ_e (nonlinear), δ = F̃ᵀα.
[[nodiscard]] Vec edge_flows(const IncidenceMatrices& mats, const Vec& weights, const Vec& alpha,
                             PlantMode mode);

/// Sum of measured flows leaving each area, F · flows.
[[nodiscard]] Vec area_flow_sums(const IncidenceMatrices& mats, const Vec& flows);

/// Flows measured in the given plant mode, using the matching weights.
[[nodiscard]] Vec measured_edge_flows(const Network& net, const Vec& alpha, PlantMode mode);

} // namespace safefc
