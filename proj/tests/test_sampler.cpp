#include <catch2/catch_amalgamated.hpp>

#include "ccs/sampler.hpp"
#include "test_util.hpp"

using ccs::Graph;
using ccs::SampledSubgraph;
using ccs::SamplingParams;
using ccs::VertexId;

TEST_CASE("one-hop ball on a path") {
    Graph g = testutil::path_graph(5);
    SampledSubgraph sg = ccs::sample_subgraph(g, 2, SamplingParams{1, 1, 100});
    CHECK(sg.to_parent == std::vector<VertexId>{1, 2, 3});
    CHECK(sg.graph.vertex_count() == 3);
    CHECK(sg.graph.edge_count() == 2);
    CHECK(sg.to_parent[sg.query_local] == 2);
    CHECK(sg.depths[sg.query_local] == 0);
}

TEST_CASE("the hard cap admits lower parent ids first") {
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (VertexId leaf = 1; leaf <= 5; ++leaf) edges.emplace_back(0, leaf);
    Graph g = Graph::from_edges(6, edges);
    SampledSubgraph sg = ccs::sample_subgraph(g, 0, SamplingParams{1, 1, 3});
    CHECK(sg.to_parent == std::vector<VertexId>{0, 1, 2});
}

TEST_CASE("depth extends past dp until the minimum count is reached") {
    Graph g = testutil::path_graph(7);
    SampledSubgraph sg = ccs::sample_subgraph(g, 0, SamplingParams{1, 4, 100});
    CHECK(sg.to_parent == std::vector<VertexId>{0, 1, 2, 3});
}

TEST_CASE("a component smaller than the minimum is returned whole") {
    Graph g = Graph::from_edges(8, {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {5, 6}, {6, 7}});
    SampledSubgraph sg = ccs::sample_subgraph(g, 1, SamplingParams{1, 50, 100});
    CHECK(sg.to_parent == std::vector<VertexId>{0, 1, 2});
}

TEST_CASE("sampled depths equal parent depths when the cap never binds") {
    ccs::Rng rng(41);
    for (int trial = 0; trial < 25; ++trial) {
        Graph g = testutil::random_graph(rng, 30 + trial, 0.1, true);
        auto q = static_cast<VertexId>(rng.next_below(g.vertex_count()));
        std::uint32_t dp = 1 + static_cast<std::uint32_t>(rng.next_below(4));
        SampledSubgraph sg =
            ccs::sample_subgraph(g, q, SamplingParams{dp, 1, 100000});
        auto parent_depths = ccs::bfs_depths(g, q);
        REQUIRE(!sg.to_parent.empty());
        for (VertexId local = 0; local < sg.graph.vertex_count(); ++local)
            CHECK(sg.depths[local] == parent_depths[sg.to_parent[local]]);
        // every vertex within dp hops must be present
        for (VertexId v = 0; v < g.vertex_count(); ++v)
            if (parent_depths.reachable(v) && parent_depths[v] <= dp)
                CHECK(sg.local_id(v).has_value());
    }
}

TEST_CASE("the sample is the full induced subgraph, not a BFS tree") {
    Graph tri = Graph::from_edges(4, {{0, 1}, {0, 2}, {1, 2}, {2, 3}});
    SampledSubgraph sg = ccs::sample_subgraph(tri, 0, SamplingParams{1, 1, 100});
    // one-hop ball is {0,1,2}; the edge 1-2 must appear though BFS reaches
    // both from 0
    CHECK(sg.graph.edge_count() == 3);
}

TEST_CASE("induced property holds on random samples") {
    ccs::Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        Graph g = testutil::random_graph(rng, 40, 0.12, true);
        auto q = static_cast<VertexId>(rng.next_below(g.vertex_count()));
        SampledSubgraph sg = ccs::sample_subgraph(g, q, SamplingParams{2, 1, 25});
        CHECK(sg.graph.vertex_count() <= 25);

        std::uint64_t internal = 0;
        for (std::size_t i = 0; i < sg.to_parent.size(); ++i)
            for (VertexId w : g.neighbors(sg.to_parent[i]))
                if (sg.local_id(w)) ++internal;
        CHECK(sg.graph.edge_count() * 2 == internal);
    }
}

TEST_CASE("size bounds hold for every parameter combination") {
    ccs::Rng rng(43);
    Graph g = testutil::random_graph(rng, 60, 0.08, true);
    for (std::uint32_t dp = 1; dp <= 4; ++dp)
        for (std::uint32_t l : {1u, 5u, 30u})
            for (std::uint32_t h : {5u, 30u, 200u}) {
                if (l > h) continue;
                SampledSubgraph sg =
                    ccs::sample_subgraph(g, 7, SamplingParams{dp, l, h});
                CHECK(sg.graph.vertex_count() <= h);
                CHECK(sg.graph.vertex_count() >=
                      std::min<std::size_t>(l, g.vertex_count()));
                CHECK(sg.to_parent[sg.query_local] == 7);
                CHECK(sg.depths[sg.query_local] == 0);
            }
}

TEST_CASE("sampling is deterministic") {
    ccs::Rng rng(44);
    Graph g = testutil::random_graph(rng, 50, 0.1, true);
    SampledSubgraph a = ccs::sample_subgraph(g, 9, SamplingParams{2, 10, 20});
    SampledSubgraph b = ccs::sample_subgraph(g, 9, SamplingParams{2, 10, 20});
    CHECK(a.to_parent == b.to_parent);
    CHECK(a.depths.depth == b.depths.depth);
}

TEST_CASE("invalid sampling parameters are rejected") {
    Graph g = testutil::path_graph(4);
    CHECK_THROWS(ccs::sample_subgraph(g, 0, SamplingParams{0, 1, 10}));
    CHECK_THROWS(ccs::sample_subgraph(g, 0, SamplingParams{1, 5, 4}));
    CHECK_THROWS(ccs::sample_subgraph(g, 0, SamplingParams{1, 0, 4}));
    CHECK_THROWS(ccs::sample_subgraph(g, 99, SamplingParams{1, 1, 4}));
}
