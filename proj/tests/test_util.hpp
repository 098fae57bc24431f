#pragma once

// Shared helpers for the test suites.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pull/graph.hpp"
#include "pull/rng.hpp"

namespace pull::testing {

// Erdos-Renyi-style random graph; may contain isolated nodes.
inline Graph random_graph(Rng& rng, std::size_t n, double p) {
    std::vector<Edge> edges;
    for (NodeId u = 0; u + 1 < n; ++u)
        for (NodeId v = u + 1; v < n; ++v)
            if (rng.uniform_real() < p) edges.push_back(Edge{u, v});
    return Graph(n, std::move(edges));
}

inline WeightedGraph random_weighted_graph(Rng& rng, std::size_t n, double p) {
    std::vector<WeightedEdge> edges;
    for (NodeId u = 0; u + 1 < n; ++u)
        for (NodeId v = u + 1; v < n; ++v)
            if (rng.uniform_real() < p) edges.push_back({u, v, 0.05 + 0.95 * rng.uniform_real()});
    return WeightedGraph(n, std::move(edges));
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        dir_ = std::filesystem::temp_directory_path() /
               ("pull_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(dir_);
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() { std::filesystem::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

} // namespace pull::testing
