#pragma once

// Expected graph structure. The marginal weight of a pair equals its node
// potential: exactly 1 for observed edges and the predicted linking
// probability for candidates, so the expected adjacency is never
// materialized beyond the observed-plus-candidate support. The sparse
// approximation keeps the observed edges and the top-K candidates by weight
// (or a weighted random sample for the WS variant).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pull/errors.hpp"
#include "pull/gcn.hpp"
#include "pull/graph.hpp"
#include "pull/losses.hpp"
#include "pull/rng.hpp"

namespace pull {

struct PotentialEntry {
    Edge e;
    double phi = 1.0; // phi(z=1 | theta)
    bool observed = false;
};

struct NodePotentialTable {
    std::size_t num_nodes = 0;
    std::vector<PotentialEntry> entries; // ascending pair order
};

// Growth schedule for the selection budget K. K is held as the closed form
// k0 * (1 + r * updates) rather than an accumulated sum so the trajectory
// reproduces |E_P|(1 + r t) bit-for-bit; the two forms are equal in exact
// arithmetic. Flooring happens only at selection time.
struct ExpectationConfig {
    double r = 0.05;
    std::size_t m = 100;
    double k0 = 0.0; // |E_P| at initialization
    int updates = 0;

    double k() const { return k0 * (1.0 + r * static_cast<double>(updates)); }
};

inline void k_update(ExpectationConfig& cfg) { cfg.updates += 1; }

// Marginal weights restricted to observed edges plus candidates. Candidate
// scores come from embeddings propagated over `prop_graph`, which is the
// previous iteration's approximated graph (the observed graph on the first
// iteration). Candidate potentials are clamped into (0,1) so a saturated
// sigmoid cannot produce an exact 0 or 1.
inline NodePotentialTable expected_weights(const ModelParams& params, const Eigen::MatrixXd& x,
                                           const Graph& gp, const WeightedGraph& prop_graph,
                                           const std::vector<Edge>& candidates) {
    const PropagationOperator prop = normalized_adjacency(prop_graph);
    const Eigen::MatrixXd h = forward(params, x, prop);

    NodePotentialTable table;
    table.num_nodes = gp.num_nodes();
    table.entries.reserve(gp.num_edges() + candidates.size());
    for (const Edge& e : gp.edges()) table.entries.push_back({e, 1.0, true});
    for (const Edge& e : candidates) {
        if (gp.has_edge(e.u, e.v)) throw ArgumentError("candidate collides with observed edge");
        table.entries.push_back({e, clamp_prob(score(h, e.u, e.v), nullptr), false});
    }
    std::sort(table.entries.begin(), table.entries.end(),
              [](const PotentialEntry& a, const PotentialEntry& b) { return a.e < b.e; });
    return table;
}

struct Approximation {
    WeightedGraph graph;                          // G_bar': observed edges + selected candidates
    std::vector<std::pair<Edge, double>> selected; // E_P^r with pseudo-labels
};

namespace detail {

inline Approximation assemble(const NodePotentialTable& table,
                              std::vector<const PotentialEntry*> chosen) {
    std::sort(chosen.begin(), chosen.end(),
              [](const PotentialEntry* a, const PotentialEntry* b) { return a->e < b->e; });
    std::vector<WeightedEdge> edges;
    std::vector<std::pair<Edge, double>> selected;
    edges.reserve(table.entries.size());
    selected.reserve(chosen.size());
    for (const PotentialEntry& p : table.entries)
        if (p.observed) edges.push_back({p.e.u, p.e.v, 1.0});
    for (const PotentialEntry* p : chosen) {
        edges.push_back({p->e.u, p->e.v, p->phi});
        selected.emplace_back(p->e, p->phi);
    }
    return Approximation{WeightedGraph(table.num_nodes, std::move(edges)), std::move(selected)};
}

inline std::size_t selection_budget(const NodePotentialTable& table, double k) {
    std::size_t observed = 0;
    for (const PotentialEntry& p : table.entries) observed += p.observed;
    const double extra = std::floor(k) - static_cast<double>(observed);
    return extra > 0.0 ? static_cast<std::size_t>(extra) : 0;
}

} // namespace detail

// Keep the floor(K) - |E_P| candidates with the largest weights; ties broken
// by ascending pair id. Output does not depend on the table's entry order.
inline Approximation approximate_topk(const NodePotentialTable& table, double k) {
    const std::size_t budget = detail::selection_budget(table, k);
    std::vector<const PotentialEntry*> cands;
    for (const PotentialEntry& p : table.entries)
        if (!p.observed) cands.push_back(&p);
    std::sort(cands.begin(), cands.end(), [](const PotentialEntry* a, const PotentialEntry* b) {
        return a->phi != b->phi ? a->phi > b->phi : a->e < b->e;
    });
    cands.resize(std::min(budget, cands.size()));
    return detail::assemble(table, std::move(cands));
}

// PULL-WS: sequential weighted sampling without replacement, selection
// probability proportional to weight (Efraimidis-Spirakis keys log(u)/w).
// Weights are clamped into (0,1) upstream; the uniform fallback guards the
// unreachable all-nonpositive case anyway.
inline Approximation approximate_weighted_sample(const NodePotentialTable& table, double k,
                                                 std::uint64_t seed) {
    const std::size_t budget = detail::selection_budget(table, k);
    std::vector<const PotentialEntry*> cands;
    for (const PotentialEntry& p : table.entries)
        if (!p.observed) cands.push_back(&p);

    bool any_positive = false;
    for (const PotentialEntry* p : cands) any_positive |= (p->phi > 0.0);

    Rng rng(seed);
    std::vector<std::pair<double, const PotentialEntry*>> keyed;
    keyed.reserve(cands.size());
    for (const PotentialEntry* p : cands) {
        const double u = rng.uniform_real_open();
        const double key = any_positive ? std::log(u) / p->phi : std::log(u);
        keyed.emplace_back(key, p);
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second->e < b.second->e;
    });
    keyed.resize(std::min(budget, keyed.size()));
    std::vector<const PotentialEntry*> chosen;
    chosen.reserve(keyed.size());
    for (const auto& [key, p] : keyed) chosen.push_back(p);
    return detail::assemble(table, std::move(chosen));
}

} // namespace pull
