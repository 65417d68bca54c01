#include <numeric>

#include <catch2/catch_amalgamated.hpp>

#include "ccs/oracle.hpp"
#include "ccs/pprcs.hpp"
#include "test_util.hpp"

using ccs::Graph;
using ccs::PprParams;
using ccs::PprState;
using ccs::VertexId;
using Catch::Matchers::WithinAbs;

namespace {

double total_mass(const PprState& st) {
    double pi = std::accumulate(st.pi_hat.begin(), st.pi_hat.end(), 0.0);
    double r = std::accumulate(st.residual.begin(), st.residual.end(), 0.0);
    return pi + r;
}

}  // namespace

TEST_CASE("forward push on a single edge runs exactly two pushes") {
    Graph g = Graph::from_edges(2, {{0, 1}});
    PprState st = ccs::forward_push(g, 0, PprParams{0.5, 0.3});
    CHECK(st.pi_hat[0] == 0.5);
    CHECK(st.pi_hat[1] == 0.25);
    CHECK(st.residual[0] == 0.25);
    CHECK(st.residual[1] == 0.0);
}

TEST_CASE("a loose threshold leads to zero pushes") {
    Graph tri = Graph::from_edges(3, {{0, 1}, {1, 2}, {2, 0}});
    // r_max * d(q) = 1.2 > 1 = r(q), so the seed is already below threshold
    PprState st = ccs::forward_push(tri, 0, PprParams{0.15, 0.6});
    CHECK(st.pi_hat[0] == 0.0);
    CHECK(st.pi_hat[1] == 0.0);
    CHECK(st.pi_hat[2] == 0.0);
    CHECK(st.residual[0] == 1.0);
}

TEST_CASE("symmetric neighbors receive equal mass up to the residual bound") {
    // push order breaks exact symmetry; estimates of the two equivalent
    // vertices can differ by at most the total leftover residual r_max * 2m
    Graph tri = Graph::from_edges(3, {{0, 1}, {1, 2}, {2, 0}});
    PprState st = ccs::forward_push(tri, 0, PprParams{0.15, 1e-6});
    CHECK_THAT(total_mass(st), WithinAbs(1.0, 1e-9));
    CHECK_THAT(st.pi_hat[1], WithinAbs(st.pi_hat[2], 2.0 * 1e-6 * 6.0));
    CHECK(st.pi_hat[0] > st.pi_hat[1]);
}

TEST_CASE("forward push rejects isolated or out-of-range seeds") {
    Graph g = Graph::from_edges(3, {{0, 1}});  // vertex 2 isolated
    CHECK_THROWS(ccs::forward_push(g, 2, PprParams{0.15, 0.01}));
    CHECK_THROWS(ccs::forward_push(g, 9, PprParams{0.15, 0.01}));
    CHECK_THROWS(ccs::forward_push(g, 0, PprParams{1.5, 0.01}));
}

TEST_CASE("push terminates with conserved mass and bounded residuals") {
    ccs::Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        Graph g = testutil::random_graph(rng, 20 + trial % 80, 0.1, true);
        auto q = static_cast<VertexId>(rng.next_below(g.vertex_count()));
        double alpha = 0.05 + 0.9 * rng.next_double();
        double r_max = std::pow(10.0, -1.0 - 4.0 * rng.next_double());
        PprParams p{alpha, r_max};
        PprState st = ccs::forward_push(g, q, p);
        CHECK_THAT(total_mass(st), WithinAbs(1.0, 1e-9));
        for (VertexId v = 0; v < g.vertex_count(); ++v) {
            CHECK(st.residual[v] >= 0.0);
            CHECK(st.residual[v] <
                  r_max * static_cast<double>(std::max<std::uint64_t>(
                              g.degree(v), 1)));
        }
    }
}

TEST_CASE("auto threshold equals an explicit 1/n threshold") {
    ccs::Rng rng(32);
    Graph g = testutil::random_graph(rng, 40, 0.12, true);
    PprState a = ccs::forward_push(g, 3, PprParams{0.15, 0.0});
    PprState b = ccs::forward_push(
        g, 3, PprParams{0.15, 1.0 / static_cast<double>(g.vertex_count())});
    CHECK(a.pi_hat == b.pi_hat);
    CHECK(a.residual == b.residual);
}

TEST_CASE("sweep on the eleven-vertex fixture finds the optimal prefix") {
    Graph g = testutil::star_fixture();
    ccs::Community c = ccs::pprcs_search(g, 7, PprParams{0.10, 1e-4});
    // the chain-end vertex v6 joins the K4: 1 cut edge over volume 15
    CHECK(c.members() == std::vector<VertexId>{6, 7, 8, 9, 10});
    CHECK_THAT(ccs::conductance(g, c.members()), WithinAbs(1.0 / 15.0, 1e-15));

    ccs::OracleResult oracle = ccs::brute_force_ccs(g, 7);
    CHECK(oracle.best_set == c.members());
    CHECK(oracle.best_conductance == ccs::conductance(g, c.members()));
}

TEST_CASE("sweep stays inside the query's component") {
    Graph g = Graph::from_edges(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
    ccs::Community c = ccs::pprcs_search(g, 4, PprParams{0.15, 1e-5});
    for (VertexId v : c.members()) CHECK(v >= 3);
    CHECK(c.contains(4));
}

TEST_CASE("star center query returns a connected community containing it") {
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (VertexId leaf = 1; leaf <= 6; ++leaf) edges.emplace_back(0, leaf);
    Graph g = Graph::from_edges(7, edges);
    ccs::Community c = ccs::pprcs_search(g, 0, PprParams{0.15, 1e-5});
    CHECK(c.contains(0));
    CHECK(ccs::is_connected_subset(g, c.members()));
}

TEST_CASE("zero pushes collapse the sweep to the seed") {
    Graph g = testutil::path_graph(6);
    ccs::Community c = ccs::pprcs_search(g, 3, PprParams{0.5, 10.0});
    CHECK(c.members() == std::vector<VertexId>{3});
}

TEST_CASE("search results contain the query, are connected, deterministic") {
    ccs::Rng rng(33);
    for (int trial = 0; trial < 60; ++trial) {
        Graph g = testutil::random_graph(rng, 15 + trial % 40, 0.12, true);
        auto q = static_cast<VertexId>(rng.next_below(g.vertex_count()));
        PprParams p{0.1 + 0.5 * rng.next_double(),
                    std::pow(10.0, -1.0 - 3.0 * rng.next_double())};
        ccs::Community a = ccs::pprcs_search(g, q, p);
        ccs::Community b = ccs::pprcs_search(g, q, p);
        CHECK(a.members() == b.members());
        CHECK(a.contains(q));
        CHECK(ccs::is_connected_subset(g, a.members()));
    }
}

TEST_CASE("the sweep minimum never loses to the oracle on tiny graphs") {
    ccs::Rng rng(34);
    for (int trial = 0; trial < 30; ++trial) {
        Graph g = testutil::random_graph(rng, 5 + trial % 5, 0.35, true);
        auto q = static_cast<VertexId>(rng.next_below(g.vertex_count()));
        ccs::Community c = ccs::pprcs_search(g, q, PprParams{0.15, 1e-5});
        std::uint64_t vol = c.volume();
        if (vol == 0 || 2 * g.edge_count() - vol == 0) continue;
        double heuristic = ccs::conductance(g, c.members());
        ccs::OracleResult oracle = ccs::brute_force_ccs(g, q);
        CHECK(oracle.best_conductance <= heuristic + 1e-12);
    }
}
