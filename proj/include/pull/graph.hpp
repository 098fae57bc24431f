#pragma once

// Undirected graph storage, degrees, candidate-pair generation, and the
// symmetric-normalized propagation operator over weighted adjacency.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pull/errors.hpp"

namespace pull {

using NodeId = std::uint32_t;

// Canonical undirected pair, u < v.
struct Edge {
    NodeId u = 0;
    NodeId v = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(NodeId a, NodeId b) {
    if (a == b) throw ArgumentError("self-loop (" + std::to_string(a) + "," + std::to_string(b) + ")");
    return a < b ? Edge{a, b} : Edge{b, a};
}

inline std::uint64_t edge_key(const Edge& e) {
    return (static_cast<std::uint64_t>(e.u) << 32) | e.v;
}

// Immutable undirected graph over nodes 0..N-1 with canonical edge list and
// per-node sorted neighbor lists.
class Graph {
public:
    Graph(std::size_t num_nodes, std::vector<Edge> edges)
        : n_(num_nodes), edges_(std::move(edges)), adj_(num_nodes) {
        for (Edge& e : edges_) {
            if (e.u == e.v) throw ArgumentError("self-loop on node " + std::to_string(e.u));
            if (e.u > e.v) std::swap(e.u, e.v);
            if (e.v >= n_) throw ArgumentError("edge endpoint " + std::to_string(e.v) + " out of range");
        }
        std::sort(edges_.begin(), edges_.end());
        if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
            throw ArgumentError("duplicate edge");
        for (const Edge& e : edges_) {
            adj_[e.u].push_back(e.v);
            adj_[e.v].push_back(e.u);
        }
        for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());
    }

    std::size_t num_nodes() const { return n_; }
    std::size_t num_edges() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }

    const std::vector<NodeId>& neighbors(NodeId v) const {
        check_node(v);
        return adj_[v];
    }

    std::size_t degree(NodeId v) const {
        check_node(v);
        return adj_[v].size();
    }

    bool has_edge(NodeId a, NodeId b) const {
        if (a == b || a >= n_ || b >= n_) return false;
        const auto& nbrs = adj_[a];
        return std::binary_search(nbrs.begin(), nbrs.end(), b);
    }

private:
    void check_node(NodeId v) const {
        if (v >= n_) throw ArgumentError("node id " + std::to_string(v) + " out of range");
    }

    std::size_t n_;
    std::vector<Edge> edges_;
    std::vector<std::vector<NodeId>> adj_;
};

struct WeightedEdge {
    NodeId u = 0;
    NodeId v = 0;
    double w = 1.0;
};

// Weighted undirected graph; weights are linking probabilities in (0,1],
// with observed edges carrying weight exactly 1.
class WeightedGraph {
public:
    WeightedGraph(std::size_t num_nodes, std::vector<WeightedEdge> edges)
        : n_(num_nodes), edges_(std::move(edges)) {
        for (WeightedEdge& e : edges_) {
            if (e.u == e.v) throw ArgumentError("self-loop on node " + std::to_string(e.u));
            if (e.u > e.v) std::swap(e.u, e.v);
            if (e.v >= n_) throw ArgumentError("edge endpoint " + std::to_string(e.v) + " out of range");
            if (!(e.w > 0.0) || e.w > 1.0 || !std::isfinite(e.w))
                throw ArgumentError("edge weight " + std::to_string(e.w) + " outside (0,1]");
        }
        std::sort(edges_.begin(), edges_.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
            return std::pair{a.u, a.v} < std::pair{b.u, b.v};
        });
        for (std::size_t i = 1; i < edges_.size(); ++i)
            if (edges_[i - 1].u == edges_[i].u && edges_[i - 1].v == edges_[i].v)
                throw ArgumentError("duplicate weighted edge");
    }

    // Observed graph with unit weights.
    static WeightedGraph unit(const Graph& g) {
        std::vector<WeightedEdge> es;
        es.reserve(g.num_edges());
        for (const Edge& e : g.edges()) es.push_back({e.u, e.v, 1.0});
        return WeightedGraph(g.num_nodes(), std::move(es));
    }

    std::size_t num_nodes() const { return n_; }
    std::size_t num_edges() const { return edges_.size(); }
    const std::vector<WeightedEdge>& edges() const { return edges_; }

private:
    std::size_t n_;
    std::vector<WeightedEdge> edges_;
};

// Sparse symmetric operator A_hat = D^{-1/2} (W + I) D^{-1/2} where D is the
// diagonal degree of (W + I). CSR layout with per-row sorted columns; each
// off-diagonal value is computed once and stored at (i,j) and (j,i), so the
// matrix is symmetric at bit level. Identity for an edgeless graph.
class PropagationOperator {
public:
    static PropagationOperator build(const WeightedGraph& wg) {
        const std::size_t n = wg.num_nodes();
        std::vector<double> degree(n, 1.0); // self-loop contributes 1
        for (const WeightedEdge& e : wg.edges()) {
            degree[e.u] += e.w;
            degree[e.v] += e.w;
        }
        std::vector<double> inv_sqrt(n);
        for (std::size_t i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(degree[i]);

        std::vector<std::vector<std::pair<NodeId, double>>> rows(n);
        for (std::size_t i = 0; i < n; ++i)
            rows[i].emplace_back(static_cast<NodeId>(i), inv_sqrt[i] * inv_sqrt[i]);
        for (const WeightedEdge& e : wg.edges()) {
            const double val = e.w * inv_sqrt[e.u] * inv_sqrt[e.v];
            rows[e.u].emplace_back(e.v, val);
            rows[e.v].emplace_back(e.u, val);
        }

        PropagationOperator op;
        op.n_ = n;
        op.row_ptr_.resize(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::sort(rows[i].begin(), rows[i].end());
            op.row_ptr_[i + 1] = op.row_ptr_[i] + rows[i].size();
        }
        op.cols_.reserve(op.row_ptr_[n]);
        op.vals_.reserve(op.row_ptr_[n]);
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& [col, val] : rows[i]) {
                op.cols_.push_back(col);
                op.vals_.push_back(val);
            }
        }
        return op;
    }

    std::size_t num_nodes() const { return n_; }

    double coeff(NodeId i, NodeId j) const {
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            if (cols_[k] == j) return vals_[k];
        return 0.0;
    }

    // A_hat * m with a fixed accumulation order (rows in CSR order).
    Eigen::MatrixXd apply(const Eigen::MatrixXd& m) const {
        if (static_cast<std::size_t>(m.rows()) != n_)
            throw ArgumentError("operand rows do not match operator size");
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
                out.row(static_cast<Eigen::Index>(i)) += vals_[k] * m.row(cols_[k]);
        return out;
    }

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> row_ptr_;
    std::vector<NodeId> cols_;
    std::vector<double> vals_;
};

inline PropagationOperator normalized_adjacency(const WeightedGraph& wg) {
    return PropagationOperator::build(wg);
}

// The M nodes with largest degree in the observed graph; ties broken by
// ascending node id. M >= N returns all nodes.
inline std::vector<NodeId> top_m_nodes(const Graph& g, std::size_t m) {
    if (m == 0) throw ArgumentError("M must be >= 1");
    std::vector<NodeId> ids(g.num_nodes());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<NodeId>(i);
    std::sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) {
        const auto da = g.degree(a), db = g.degree(b);
        return da != db ? da > db : a < b;
    });
    ids.resize(std::min(m, ids.size()));
    return ids;
}

// All canonical non-edges (i,j) with i or j among the top-M degree nodes,
// in ascending pair order.
inline std::vector<Edge> candidate_pairs(const Graph& g, std::size_t m) {
    const std::vector<NodeId> top = top_m_nodes(g, m);
    std::vector<char> in_top(g.num_nodes(), 0);
    for (NodeId s : top) in_top[s] = 1;

    std::vector<Edge> out;
    for (NodeId s : top) {
        for (NodeId t = 0; t < g.num_nodes(); ++t) {
            if (t == s) continue;
            if (in_top[t] && t < s) continue; // both in top set: emit once
            if (g.has_edge(s, t)) continue;
            out.push_back(make_edge(s, t));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace pull
