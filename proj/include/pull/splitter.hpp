#pragma once

// Deterministic seeded partitioning of edges into train / valid-missing /
// test-missing sets, plus uniform sampling of evaluation non-edges.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "pull/errors.hpp"
#include "pull/graph.hpp"
#include "pull/rng.hpp"

namespace pull {

struct Split {
    std::vector<Edge> train_edges;
    std::vector<Edge> valid_missing;
    std::vector<Edge> valid_neg;
    std::vector<Edge> test_missing;
    std::vector<Edge> test_neg;
    std::uint64_t seed = 0;
    double r_m = 0.0;
    double r_valid = 0.0;
    std::size_t num_nodes = 0;
};

// `count` distinct canonical pairs outside E and `exclude`, uniform over the
// available non-edges. Dense graphs fall back to full enumeration so the
// rejection loop cannot stall.
inline std::vector<Edge> sample_nonedges(const Graph& g, std::size_t count, std::uint64_t seed,
                                         const std::vector<Edge>& exclude) {
    const std::size_t n = g.num_nodes();
    const std::size_t total_pairs = n * (n - 1) / 2;

    std::unordered_set<std::uint64_t> banned;
    banned.reserve(g.num_edges() + exclude.size());
    for (const Edge& e : g.edges()) banned.insert(edge_key(e));
    for (const Edge& e : exclude) banned.insert(edge_key(e));
    if (total_pairs < banned.size() + count)
        throw CapacityError("not enough non-edges: need " + std::to_string(count));
    if (count == 0) return {};

    Rng rng(seed);
    std::vector<Edge> out;
    out.reserve(count);

    const std::size_t available = total_pairs - banned.size();
    if (available < 4 * count) {
        std::vector<Edge> pool;
        pool.reserve(available);
        for (NodeId u = 0; u + 1 < n; ++u)
            for (NodeId v = u + 1; v < n; ++v)
                if (!banned.contains(edge_key(Edge{u, v}))) pool.push_back(Edge{u, v});
        // Partial Fisher-Yates: first `count` positions.
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(pool.size() - i));
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
    } else {
        std::unordered_set<std::uint64_t> drawn;
        drawn.reserve(count);
        while (out.size() < count) {
            const NodeId a = static_cast<NodeId>(rng.uniform_index(n));
            const NodeId b = static_cast<NodeId>(rng.uniform_index(n));
            if (a == b) continue;
            const Edge e = make_edge(a, b);
            const std::uint64_t key = edge_key(e);
            if (banned.contains(key) || drawn.contains(key)) continue;
            drawn.insert(key);
            out.push_back(e);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// floor(r_m*|E|) test and floor(r_valid*|E|) valid missing edges chosen by a
// seeded shuffle; the remainder trains. Negatives are drawn from disjoint
// derived streams and never collide with any original edge.
inline Split make_split(const Graph& g, double r_m, double r_valid, std::uint64_t seed) {
    if (!(r_m >= 0.0) || r_m >= 1.0) throw ArgumentError("r_m outside [0,1)");
    if (!(r_valid >= 0.0) || r_valid >= 1.0) throw ArgumentError("r_valid outside [0,1)");
    if (r_m + r_valid >= 1.0) throw ArgumentError("r_m + r_valid must be < 1");

    const std::size_t ne = g.num_edges();
    const auto n_test = static_cast<std::size_t>(std::floor(r_m * static_cast<double>(ne)));
    const auto n_valid = static_cast<std::size_t>(std::floor(r_valid * static_cast<double>(ne)));
    if (n_test + n_valid >= ne) throw ArgumentError("split leaves no training edges");

    std::vector<Edge> shuffled = g.edges();
    Rng rng(derive_seed(seed, "split/shuffle"));
    rng.shuffle(shuffled);

    Split s;
    s.seed = seed;
    s.r_m = r_m;
    s.r_valid = r_valid;
    s.num_nodes = g.num_nodes();
    s.test_missing.assign(shuffled.begin(), shuffled.begin() + n_test);
    s.valid_missing.assign(shuffled.begin() + n_test, shuffled.begin() + n_test + n_valid);
    s.train_edges.assign(shuffled.begin() + n_test + n_valid, shuffled.end());
    std::sort(s.test_missing.begin(), s.test_missing.end());
    std::sort(s.valid_missing.begin(), s.valid_missing.end());
    std::sort(s.train_edges.begin(), s.train_edges.end());

    s.valid_neg = sample_nonedges(g, n_valid, derive_seed(seed, "split/valid-neg"), {});
    s.test_neg = sample_nonedges(g, n_test, derive_seed(seed, "split/test-neg"), s.valid_neg);
    return s;
}

} // namespace pull
