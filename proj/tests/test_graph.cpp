#include "catch_amalgamated.hpp"

#include "safefc/graph.hpp"
#include "safefc/scenarios.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace safefc;
using test::vec;

TEST_CASE("triangle incidence columns")
{
    const auto m = build_incidence(scenarios::default_topology());
    Mat expected(3, 3);
    expected << 1, 0, 1, -1, 1, 0, 0, -1, -1;
    CHECK(m.full == expected);
    CHECK(m.reduced == expected.topRows(2));
    Mat t(2, 3);
    t << 1, 0, -1, 0, 1, -1;
    CHECK(m.difference == t);
}

TEST_CASE("two areas, one edge")
{
    const auto m = build_incidence({2, {{0, 1, 1.0, 1.0}}});
    CHECK(m.full == (Mat(2, 1) << 1, -1).finished());
    CHECK(m.reduced == (Mat(1, 1) << 1).finished());
}

TEST_CASE("path graph has full-rank reduced incidence")
{
    const auto m = build_incidence({3, {{0, 1, 1.0, 1.0}, {1, 2, 1.0, 1.0}}});
    Eigen::FullPivLU<Mat> lu(m.reduced);
    CHECK(lu.rank() == 2);
}

TEST_CASE("invalid topologies are rejected")
{
    CHECK_THROWS_AS(build_incidence({3, {{0, 1, 1.0, 1.0}}}), TopologyError);
    CHECK_THROWS_AS(build_incidence({2, {{0, 0, 1.0, 1.0}}}), TopologyError);
    CHECK_THROWS_AS(build_incidence({2, {{0, 5, 1.0, 1.0}}}), TopologyError);
    CHECK_THROWS_AS(build_incidence({2, {{0, 1, 1.0, 1.0}, {1, 0, 1.0, 1.0}}}), TopologyError);
    CHECK_THROWS_AS(build_incidence({2, {{0, 1, -1.0, 1.0}}}), TopologyError);
    CHECK_FALSE(is_connected({4, {{0, 1, 1, 1}, {2, 3, 1, 1}}}));
}

TEST_CASE("single area has empty reduced matrices")
{
    const auto net = make_network({1, {}});
    CHECK(net.mats.reduced.rows() == 0);
    CHECK(net.coupling.rows() == 1);
    CHECK(net.coupling.cols() == 0);
    CHECK(net_tieline_power_linear(net.mats, net.b_linear, Vec(0)) == Vec::Zero(1));
}

TEST_CASE("zero angles give zero net tie-line power")
{
    const auto net = make_network(scenarios::default_topology());
    CHECK(net_tieline_power_linear(net.mats, net.b_linear, Vec::Zero(2)).isZero(0.0));
    CHECK(edge_flows(net.mats, net.b_linear, Vec::Zero(2), PlantMode::Linear).isZero(0.0));
    CHECK(edge_flows(net.mats, net.b_nonlinear, Vec::Zero(2), PlantMode::Nonlinear).isZero(0.0));
}

TEST_CASE("net tie-line power matches the per-neighbour sum")
{
    const auto topo = scenarios::default_topology();
    const auto net = make_network(topo);
    const Vec alpha = vec({0.01, 0.0});
    // θ relative to area 3: θ = (α, 0); φ_i = Σ_j B_ij (θ_i − θ_j).
    const double th[3] = {alpha[0], alpha[1], 0.0};
    Vec hand = Vec::Zero(3);
    for (const auto& l : topo.tie_lines) {
        hand[static_cast<Eigen::Index>(l.from)] += l.b_linear * (th[l.from] - th[l.to]);
        hand[static_cast<Eigen::Index>(l.to)] += l.b_linear * (th[l.to] - th[l.from]);
    }
    const Vec phi = net_tieline_power_linear(net.mats, net.b_linear, alpha);
    CHECK((phi - hand).norm() < 1e-15);
    CHECK(phi[0] == Catch::Approx(0.2));
    CHECK(phi[1] == Catch::Approx(-0.1));
    CHECK(phi[2] == Catch::Approx(-0.1));
}

TEST_CASE("net tie-line power sums to zero")
{
    const auto net = make_network(scenarios::default_topology());
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const Vec alpha = vec({u(rng), u(rng)});
        CHECK(std::abs(net_tieline_power_linear(net.mats, net.b_linear, alpha).sum()) < 1e-13);
        const Vec flows = edge_flows(net.mats, net.b_nonlinear, alpha, PlantMode::Nonlinear);
        CHECK(std::abs(area_flow_sums(net.mats, flows).sum()) < 1e-13);
    }
}

TEST_CASE("reduced Laplacian is symmetric positive definite")
{
    const auto net = make_network(scenarios::default_topology());
    CHECK((net.reduced_laplacian - net.reduced_laplacian.transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Mat> eig(net.reduced_laplacian);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("nonlinear flow at a quarter turn equals the line rating")
{
    const auto net = make_network({2, {{0, 1, 10.0, 10.0}}});
    const Vec f = edge_flows(net.mats, net.b_nonlinear, vec({std::numbers::pi / 2}), PlantMode::Nonlinear);
    CHECK(f[0] == Catch::Approx(10.0));
    const Vec g = edge_flows(net.mats, net.b_nonlinear, vec({std::numbers::pi}), PlantMode::Nonlinear);
    CHECK(std::abs(g[0]) < 1e-12);
}

TEST_CASE("linear flows sum to the coupling product")
{
    const auto net = make_network(scenarios::default_topology());
    const Vec alpha = vec({0.03, -0.02});
    const Vec sums = area_flow_sums(net.mats, measured_edge_flows(net, alpha, PlantMode::Linear));
    CHECK((sums - net.coupling * alpha).norm() < 1e-15);
}
