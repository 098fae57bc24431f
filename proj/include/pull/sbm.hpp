#pragma once

// Stochastic block model generator for desk-scale experiments. Blocks are
// contiguous id ranges; features are a one-hot block indicator followed by
// standard-normal noise columns.

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "pull/errors.hpp"
#include "pull/graph.hpp"
#include "pull/rng.hpp"

namespace pull {

struct SbmGraph {
    Graph graph;
    Eigen::MatrixXd features;
    std::vector<std::size_t> block_of;
};

inline SbmGraph gen_sbm(std::size_t num_nodes, std::size_t num_blocks, double p_in, double p_out,
                        std::size_t feature_dim, std::uint64_t seed) {
    if (num_blocks == 0 || num_blocks > num_nodes) throw ArgumentError("invalid block count");
    if (!(p_out >= 0.0 && p_out < p_in && p_in <= 1.0))
        throw ArgumentError("require 0 <= p_out < p_in <= 1");
    if (feature_dim < num_blocks) throw ArgumentError("feature_dim must be >= num_blocks");

    // First (num_nodes % num_blocks) blocks get one extra node.
    std::vector<std::size_t> block_of(num_nodes);
    {
        const std::size_t base = num_nodes / num_blocks;
        const std::size_t extra = num_nodes % num_blocks;
        std::size_t node = 0;
        for (std::size_t b = 0; b < num_blocks; ++b) {
            const std::size_t size = base + (b < extra ? 1 : 0);
            for (std::size_t k = 0; k < size; ++k) block_of[node++] = b;
        }
    }

    Rng edge_rng(derive_seed(seed, "sbm/edges"));
    std::vector<Edge> edges;
    for (NodeId u = 0; u + 1 < num_nodes; ++u) {
        for (NodeId v = u + 1; v < num_nodes; ++v) {
            const double p = block_of[u] == block_of[v] ? p_in : p_out;
            if (edge_rng.uniform_real() < p) edges.push_back(Edge{u, v});
        }
    }

    Rng feat_rng(derive_seed(seed, "sbm/features"));
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(num_nodes, feature_dim);
    for (std::size_t i = 0; i < num_nodes; ++i) {
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(block_of[i])) = 1.0;
        for (std::size_t j = num_blocks; j < feature_dim; ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = feat_rng.normal();
    }

    return SbmGraph{Graph(num_nodes, std::move(edges)), std::move(x), std::move(block_of)};
}

} // namespace pull
