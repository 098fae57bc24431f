#pragma once

// Text-file ingestion and emission.
//
// Edge-list file: one edge per line, two whitespace-separated non-negative
// integers "u v". Duplicates and self-loops are rejected at load.
// Feature file: first line "N d", then N lines of d floats.
// Weighted-graph dump: TSV "u\tv\tweight" with 17-significant-digit weights.

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pull/errors.hpp"
#include "pull/graph.hpp"

namespace pull {

// Shortest representation would also round-trip, but a fixed 17-significant-
// digit form keeps every emitted file byte-stable across formatting changes.
inline std::string format_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct EdgeListFile {
    std::vector<Edge> edges;
    std::size_t min_num_nodes = 0; // max endpoint + 1
};

inline EdgeListFile load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open edge file: " + path);
    EdgeListFile out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        long long a = -1, b = -1;
        if (!(ls >> a)) continue; // blank line
        if (!(ls >> b)) throw ArgumentError(path + ":" + std::to_string(lineno) + ": expected two integers");
        std::string rest;
        if (ls >> rest) throw ArgumentError(path + ":" + std::to_string(lineno) + ": trailing tokens");
        if (a < 0 || b < 0) throw ArgumentError(path + ":" + std::to_string(lineno) + ": negative node id");
        if (a == b) throw ArgumentError(path + ":" + std::to_string(lineno) + ": self-loop");
        out.edges.push_back(make_edge(static_cast<NodeId>(a), static_cast<NodeId>(b)));
        out.min_num_nodes = std::max({out.min_num_nodes, static_cast<std::size_t>(a) + 1,
                                      static_cast<std::size_t>(b) + 1});
    }
    std::vector<Edge> sorted = out.edges;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ArgumentError(path + ": duplicate edge");
    return out;
}

inline Eigen::MatrixXd load_features(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open feature file: " + path);
    std::size_t n = 0, d = 0;
    if (!(in >> n >> d)) throw ArgumentError(path + ": expected header \"N d\"");
    Eigen::MatrixXd x(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            double v;
            if (!(in >> v)) throw ArgumentError(path + ": truncated feature row " + std::to_string(i));
            if (!std::isfinite(v)) throw ArgumentError(path + ": non-finite feature value");
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    return x;
}

// Write-temp-then-rename so readers never observe a partial file.
inline void atomic_write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ArgumentError("cannot write: " + tmp.string());
        out << content;
        if (!out) throw ArgumentError("short write: " + tmp.string());
    }
    fs::rename(tmp, target);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void save_edge_list(const std::string& path, const std::vector<Edge>& edges) {
    std::string body;
    for (const Edge& e : edges)
        body += std::to_string(e.u) + " " + std::to_string(e.v) + "\n";
    atomic_write_file(path, body);
}

inline void save_features(const std::string& path, const Eigen::MatrixXd& x) {
    std::string body = std::to_string(x.rows()) + " " + std::to_string(x.cols()) + "\n";
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (j) body += ' ';
            body += format_g17(x(i, j));
        }
        body += '\n';
    }
    atomic_write_file(path, body);
}

inline void save_weighted_graph_tsv(const std::string& path, const WeightedGraph& wg) {
    std::string body = "u\tv\tweight\n";
    for (const WeightedEdge& e : wg.edges())
        body += std::to_string(e.u) + "\t" + std::to_string(e.v) + "\t" + format_g17(e.w) + "\n";
    atomic_write_file(path, body);
}

} // namespace pull
