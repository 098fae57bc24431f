#include <catch2/catch_amalgamated.hpp>

#include "pull/graph.hpp"
#include "test_util.hpp"

using namespace pull;

TEST_CASE("degree counts observed neighbors") {
    const Graph triangle(3, {{0, 1}, {1, 2}, {0, 2}});
    CHECK(triangle.degree(1) == 2);

    const Graph path(3, {{0, 1}, {1, 2}});
    CHECK(path.degree(0) == 1);

    const Graph with_isolated(4, {{0, 1}, {1, 2}, {0, 2}});
    CHECK(with_isolated.degree(3) == 0);

    CHECK_THROWS_AS(path.degree(3), ArgumentError);
}

TEST_CASE("graph construction validates edges") {
    CHECK_THROWS_AS(Graph(3, {{0, 0}}), ArgumentError);            // self-loop
    CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), ArgumentError);    // duplicate after canonicalization
    CHECK_THROWS_AS(Graph(3, {{0, 3}}), ArgumentError);            // endpoint out of range
    const Graph g(3, {{2, 0}});                                    // canonicalized to (0,2)
    CHECK(g.edges() == std::vector<Edge>{{0, 2}});
    CHECK(g.has_edge(2, 0));
}

TEST_CASE("top_m_nodes orders by degree then id") {
    const Graph star(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    CHECK(top_m_nodes(star, 1) == std::vector<NodeId>{0});

    const Graph path(3, {{0, 1}, {1, 2}});
    CHECK(top_m_nodes(path, 2) == std::vector<NodeId>{1, 0}); // tie 0 vs 2 -> 0

    CHECK(top_m_nodes(path, 3).size() == 3);
    CHECK(top_m_nodes(path, 100).size() == 3); // M >= N returns all
    CHECK_THROWS_AS(top_m_nodes(path, 0), ArgumentError);
}

TEST_CASE("top_m_nodes is deterministic and prefix-stable") {
    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
        const Graph g = testing::random_graph(rng, 12, 0.3);
        const auto full = top_m_nodes(g, 12);
        for (std::size_t m = 1; m <= 12; ++m) {
            const auto prefix = top_m_nodes(g, m);
            CHECK(std::equal(prefix.begin(), prefix.end(), full.begin()));
            CHECK(prefix == top_m_nodes(g, m)); // rerun identical
        }
    }
}

TEST_CASE("candidate_pairs excludes observed edges and self-loops") {
    const Graph star(4, {{0, 1}, {0, 2}, {0, 3}});
    CHECK(candidate_pairs(star, 1).empty()); // all (0,leaf) observed

    const Graph path(4, {{0, 1}, {1, 2}});
    CHECK(candidate_pairs(path, 1) == std::vector<Edge>{{1, 3}});

    const Graph sparse(3, {{0, 1}});
    CHECK(candidate_pairs(sparse, 3) == std::vector<Edge>{{0, 2}, {1, 2}});
}

TEST_CASE("candidate_pairs properties on random graphs") {
    Rng rng(5);
    for (int t = 0; t < 25; ++t) {
        const Graph g = testing::random_graph(rng, 10, 0.35);
        const std::size_t m = 1 + rng.uniform_index(10);
        const auto cands = candidate_pairs(g, m);
        for (const Edge& e : cands) {
            CHECK(e.u < e.v);
            CHECK_FALSE(g.has_edge(e.u, e.v));
        }
        CHECK(std::is_sorted(cands.begin(), cands.end()));
        CHECK(std::adjacent_find(cands.begin(), cands.end()) == cands.end());
    }
}

TEST_CASE("normalized_adjacency hand examples") {
    // One edge, weight 1: degrees (2,2) -> all entries 0.5.
    const WeightedGraph one(2, {{0, 1, 1.0}});
    const PropagationOperator op = normalized_adjacency(one);
    CHECK(op.coeff(0, 0) == Catch::Approx(0.5).margin(1e-15));
    CHECK(op.coeff(0, 1) == Catch::Approx(0.5).margin(1e-15));

    // Edgeless graph -> identity.
    const WeightedGraph empty(3, {});
    const PropagationOperator id = normalized_adjacency(empty);
    for (NodeId i = 0; i < 3; ++i)
        for (NodeId j = 0; j < 3; ++j) CHECK(id.coeff(i, j) == (i == j ? 1.0 : 0.0));

    // Half-weight edge: degrees 1.5 -> diag 2/3, off-diag 1/3.
    const WeightedGraph half(2, {{0, 1, 0.5}});
    const PropagationOperator oph = normalized_adjacency(half);
    CHECK(oph.coeff(0, 0) == Catch::Approx(2.0 / 3.0).margin(1e-15));
    CHECK(oph.coeff(0, 1) == Catch::Approx(1.0 / 3.0).margin(1e-15));
}

TEST_CASE("normalized_adjacency is bit-symmetric") {
    Rng rng(17);
    for (int t = 0; t < 20; ++t) {
        const WeightedGraph wg = testing::random_weighted_graph(rng, 9, 0.4);
        const PropagationOperator op = normalized_adjacency(wg);
        for (NodeId i = 0; i < 9; ++i)
            for (NodeId j = 0; j < 9; ++j) CHECK(op.coeff(i, j) == op.coeff(j, i));
    }
}

TEST_CASE("weighted graph validates weights") {
    CHECK_THROWS_AS(WeightedGraph(2, {{0, 1, 0.0}}), ArgumentError);
    CHECK_THROWS_AS(WeightedGraph(2, {{0, 1, -0.2}}), ArgumentError);
    CHECK_THROWS_AS(WeightedGraph(2, {{0, 1, 1.5}}), ArgumentError);
    CHECK_THROWS_AS(WeightedGraph(2, {{0, 0, 0.5}}), ArgumentError);
}

TEST_CASE("unit weighted graph carries every edge at weight 1") {
    Rng rng(23);
    const Graph g = testing::random_graph(rng, 8, 0.4);
    const WeightedGraph wg = WeightedGraph::unit(g);
    REQUIRE(wg.num_edges() == g.num_edges());
    for (std::size_t i = 0; i < g.num_edges(); ++i) {
        CHECK(wg.edges()[i].u == g.edges()[i].u);
        CHECK(wg.edges()[i].v == g.edges()[i].v);
        CHECK(wg.edges()[i].w == 1.0);
    }
}

TEST_CASE("propagation operator apply matches dense multiplication") {
    Rng rng(31);
    const WeightedGraph wg = testing::random_weighted_graph(rng, 7, 0.5);
    const PropagationOperator op = normalized_adjacency(wg);
    Eigen::MatrixXd dense(7, 7);
    for (NodeId i = 0; i < 7; ++i)
        for (NodeId j = 0; j < 7; ++j) dense(i, j) = op.coeff(i, j);
    Eigen::MatrixXd x(7, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
    CHECK((op.apply(x) - dense * x).cwiseAbs().maxCoeff() < 1e-12);
}
