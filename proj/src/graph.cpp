#include "safefc/graph.hpp"

#include <cmath>
#include <set>
#include <string>
#include <utility>

namespace safefc {

std::vector<std::string> topology_issues(const Topology& topology)
{
    std::vector<std::string> issues;
    const std::size_t n = topology.n_areas;
    if (n == 0) {
        issues.emplace_back("at least one area is required");
        return issues;
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t e = 0; e < topology.tie_lines.size(); ++e) {
        const auto& line = topology.tie_lines[e];
        const std::string tag = "tie-line " + std::to_string(e + 1) + ": ";
        if (line.from >= n || line.to >= n) {
            issues.push_back(tag + "endpoint out of range");
            continue;
        }
        if (line.from == line.to) {
            issues.push_back(tag + "self-loop");
            continue;
        }
        if (!seen.insert(std::minmax(line.from, line.to)).second) {
            issues.push_back(tag + "duplicate line between areas " + std::to_string(line.from + 1) + " and " +
                             std::to_string(line.to + 1));
        }
        if (!(line.b_linear > 0.0) || !std::isfinite(line.b_linear)) {
            issues.push_back(tag + "b_linear must be positive");
        }
        if (!(line.b_nonlinear > 0.0) || !std::isfinite(line.b_nonlinear)) {
            issues.push_back(tag + "b_nonlinear must be positive");
        }
    }
    if (issues.empty() && !is_connected(topology)) {
        issues.emplace_back("area graph is disconnected");
    }
    return issues;
}

bool is_connected(const Topology& topology)
{
    const std::size_t n = topology.n_areas;
    if (n == 0) {
        return false;
    }
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& line : topology.tie_lines) {
        if (line.from < n && line.to < n) {
            adj[line.from].push_back(line.to);
            adj[line.to].push_back(line.from);
        }
    }
    std::vector<bool> visited(n, false);
    std::vector<std::size_t> stack{0};
    visited[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto u : adj[v]) {
            if (!visited[u]) {
                visited[u] = true;
                ++count;
                stack.push_back(u);
            }
        }
    }
    return count == n;
}

IncidenceMatrices build_incidence(const Topology& topology)
{
    if (auto issues = topology_issues(topology); !issues.empty()) {
        std::string msg = "invalid topology:";
        for (auto& s : issues) {
            msg += " " + s + ";";
        }
        throw TopologyError(msg);
    }
    const auto n = static_cast<Eigen::Index>(topology.n_areas);
    const auto m = static_cast<Eigen::Index>(topology.tie_lines.size());

    IncidenceMatrices mats;
    mats.full = Mat::Zero(n, m);
    for (Eigen::Index e = 0; e < m; ++e) {
        const auto& line = topology.tie_lines[static_cast<std::size_t>(e)];
        mats.full(static_cast<Eigen::Index>(line.from), e) = 1.0;
        mats.full(static_cast<Eigen::Index>(line.to), e) = -1.0;
    }
    mats.reduced = mats.full.topRows(n - 1);
    mats.difference = Mat::Zero(n - 1, n);
    mats.difference.leftCols(n - 1).setIdentity();
    mats.difference.col(n - 1).setConstant(-1.0);
    return mats;
}

Network make_network(const Topology& topology)
{
    Network net;
    net.topology = topology;
    net.mats = build_incidence(topology);
    const auto m = static_cast<Eigen::Index>(topology.tie_lines.size());
    net.b_linear.resize(m);
    net.b_nonlinear.resize(m);
    for (Eigen::Index e = 0; e < m; ++e) {
        net.b_linear[e] = topology.tie_lines[static_cast<std::size_t>(e)].b_linear;
        net.b_nonlinear[e] = topology.tie_lines[static_cast<std::size_t>(e)].b_nonlinear;
    }
    net.coupling = net.mats.full * net.b_linear.asDiagonal() * net.mats.reduced.transpose();
    net.reduced_laplacian = net.mats.reduced * net.b_linear.asDiagonal() * net.mats.reduced.transpose();
    return net;
}

namespace {

void check_dims(const IncidenceMatrices& mats, const Vec& weights, const Vec& alpha)
{
    if (alpha.size() != mats.reduced.rows()) {
        throw std::invalid_argument("alpha has length " + std::to_string(alpha.size()) + ", expected " +
                                    std::to_string(mats.reduced.rows()));
    }
    if (weights.size() != mats.full.cols()) {
        throw std::invalid_argument("weights have length " + std::to_string(weights.size()) + ", expected " +
                                    std::to_string(mats.full.cols()));
    }
}

} // namespace

Vec net_tieline_power_linear(const IncidenceMatrices& mats, const Vec& weights, const Vec& alpha)
{
    check_dims(mats, weights, alpha);
    return mats.full * (weights.asDiagonal() * (mats.reduced.transpose() * alpha));
}

Vec edge_flows(const IncidenceMatrices& mats, const Vec& weights, const Vec& alpha, PlantMode mode)
{
    check_dims(mats, weights, alpha);
    const Vec delta = mats.reduced.transpose() * alpha;
    if (mode == PlantMode::Linear) {
        return weights.cwiseProduct(delta);
    }
    return weights.cwiseProduct(delta.array().sin().matrix());
}

Vec area_flow_sums(const IncidenceMatrices& mats, const Vec& flows)
{
    if (flows.size() != mats.full.cols()) {
        throw std::invalid_argument("flow vector length does not match the number of tie-lines");
    }
    return mats.full * flows;
}

Vec measured_edge_flows(const Network& net, const Vec& alpha, PlantMode mode)
{
    return edge_flows(net.mats, mode == PlantMode::Linear ? net.b_linear : net.b_nonlinear, alpha, mode);
}

} // namespace safefc
