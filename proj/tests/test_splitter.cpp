#include <catch2/catch_amalgamated.hpp>

#include <unordered_set>

#include "pull/serialize.hpp"
#include "pull/splitter.hpp"
#include "test_util.hpp"

using namespace pull;

namespace {

Graph ten_edge_graph() {
    // 5-clique has exactly 10 edges.
    std::vector<Edge> edges;
    for (NodeId u = 0; u < 5; ++u)
        for (NodeId v = u + 1; v < 5; ++v) edges.push_back({u, v});
    return Graph(6, std::move(edges)); // node 5 isolated: non-edges exist
}

} // namespace

TEST_CASE("split sizes follow the floor rule") {
    const Split s = make_split(ten_edge_graph(), 0.2, 0.1, 3);
    CHECK(s.test_missing.size() == 2);
    CHECK(s.valid_missing.size() == 1);
    CHECK(s.train_edges.size() == 7);
    CHECK(s.test_neg.size() == 2);
    CHECK(s.valid_neg.size() == 1);
}

TEST_CASE("floor rule at dataset scale") {
    // Path graph with exactly 36,101 edges: r_m = 0.1 must give 3,610.
    std::vector<Edge> path;
    for (NodeId u = 0; u < 36101; ++u) path.push_back({u, u + 1});
    const Graph g(36102, std::move(path));
    const Split s = make_split(g, 0.1, 0.1, 1);
    CHECK(s.test_missing.size() == 3610);
    CHECK(s.valid_missing.size() == 3610);
    CHECK(s.train_edges.size() == 36101 - 2 * 3610);
}

TEST_CASE("zero ratios keep every edge in train") {
    const Split s = make_split(ten_edge_graph(), 0.0, 0.0, 9);
    CHECK(s.train_edges.size() == 10);
    CHECK(s.test_missing.empty());
    CHECK(s.valid_missing.empty());
    CHECK(s.test_neg.empty());
    CHECK(s.valid_neg.empty());
}

TEST_CASE("split is deterministic per seed") {
    const Graph g = ten_edge_graph();
    const std::string a = split_to_json(make_split(g, 0.2, 0.1, 123)).dump();
    const std::string b = split_to_json(make_split(g, 0.2, 0.1, 123)).dump();
    const std::string c = split_to_json(make_split(g, 0.2, 0.1, 124)).dump();
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("split rejects bad ratios") {
    const Graph g = ten_edge_graph();
    CHECK_THROWS_AS(make_split(g, 1.0, 0.0, 0), ArgumentError);
    CHECK_THROWS_AS(make_split(g, -0.1, 0.0, 0), ArgumentError);
    CHECK_THROWS_AS(make_split(g, 0.5, 0.5, 0), ArgumentError);
}

TEST_CASE("split invariants hold across 100 seeds") {
    Rng rng(7);
    const Graph g = testing::random_graph(rng, 12, 0.4);
    REQUIRE(g.num_edges() >= 10);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Split s = make_split(g, 0.25, 0.1, seed);
        CHECK(s.valid_neg.size() == s.valid_missing.size());
        CHECK(s.test_neg.size() == s.test_missing.size());

        std::unordered_set<std::uint64_t> seen;
        auto track = [&](const std::vector<Edge>& set) {
            for (const Edge& e : set) CHECK(seen.insert(edge_key(e)).second);
        };
        track(s.train_edges);
        track(s.valid_missing);
        track(s.valid_neg);
        track(s.test_missing);
        track(s.test_neg);

        // Union of the three edge parts is the original edge set.
        CHECK(s.train_edges.size() + s.valid_missing.size() + s.test_missing.size() ==
              g.num_edges());
        for (const Edge& e : s.valid_neg) CHECK_FALSE(g.has_edge(e.u, e.v));
        for (const Edge& e : s.test_neg) CHECK_FALSE(g.has_edge(e.u, e.v));
    }
}

TEST_CASE("sample_nonedges respects capacity") {
    std::vector<Edge> clique;
    for (NodeId u = 0; u < 4; ++u)
        for (NodeId v = u + 1; v < 4; ++v) clique.push_back({u, v});
    const Graph complete(4, clique);
    CHECK_THROWS_AS(sample_nonedges(complete, 1, 0, {}), CapacityError);
    CHECK(sample_nonedges(complete, 0, 0, {}).empty());

    const Graph tiny(3, {{0, 1}});
    const auto sampled = sample_nonedges(tiny, 2, 5, {});
    CHECK(sampled == std::vector<Edge>{{0, 2}, {1, 2}});
    CHECK_THROWS_AS(sample_nonedges(tiny, 3, 5, {}), CapacityError);
    CHECK_THROWS_AS(sample_nonedges(tiny, 2, 5, {{0, 2}}), CapacityError);
}

TEST_CASE("sample_nonedges avoids exclusions in both sampling regimes") {
    Rng rng(77);
    const Graph g = testing::random_graph(rng, 30, 0.1);
    const std::vector<Edge> exclude = sample_nonedges(g, 20, 1, {});
    for (std::size_t count : {std::size_t{5}, std::size_t{200}}) {
        const auto out = sample_nonedges(g, count, 2, exclude);
        CHECK(out.size() == count);
        std::unordered_set<std::uint64_t> banned;
        for (const Edge& e : exclude) banned.insert(edge_key(e));
        for (const Edge& e : out) {
            CHECK_FALSE(g.has_edge(e.u, e.v));
            CHECK_FALSE(banned.contains(edge_key(e)));
        }
    }
}

TEST_CASE("split JSON round-trips byte-identically") {
    testing::TempDir tmp("split");
    const Split s = make_split(ten_edge_graph(), 0.2, 0.1, 42);
    save_split(tmp.path("s.json"), s);
    const Split loaded = load_split(tmp.path("s.json"));
    CHECK(split_to_json(loaded).dump() == split_to_json(s).dump());
    save_split(tmp.path("s2.json"), loaded);
    CHECK(read_file(tmp.path("s2.json")) == read_file(tmp.path("s.json")));
}
