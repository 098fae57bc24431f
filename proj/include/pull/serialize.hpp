#pragma once

// File formats: Split JSON, model checkpoint JSON, TrainHistory CSV, and the
// MetricsReport. JSON objects are emitted with sorted keys (nlohmann's map
// ordering); numbers round-trip to the same 64-bit value. CSV floats use 17
// significant digits.

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "pull/errors.hpp"
#include "pull/gcn.hpp"
#include "pull/graph.hpp"
#include "pull/io.hpp"
#include "pull/splitter.hpp"
#include "pull/trainer.hpp"

namespace pull {

using nlohmann::json;

inline json edges_to_json(const std::vector<Edge>& edges) {
    json arr = json::array();
    for (const Edge& e : edges) arr.push_back(json::array({e.u, e.v}));
    return arr;
}

inline std::vector<Edge> edges_from_json(const json& arr) {
    std::vector<Edge> out;
    out.reserve(arr.size());
    for (const auto& pair : arr) {
        if (!pair.is_array() || pair.size() != 2) throw ArgumentError("malformed edge pair");
        out.push_back(make_edge(pair[0].get<NodeId>(), pair[1].get<NodeId>()));
    }
    return out;
}

inline json split_to_json(const Split& s) {
    json j;
    j["num_nodes"] = s.num_nodes;
    j["r_m"] = s.r_m;
    j["r_valid"] = s.r_valid;
    j["seed"] = s.seed;
    j["train_edges"] = edges_to_json(s.train_edges);
    j["valid_missing"] = edges_to_json(s.valid_missing);
    j["valid_neg"] = edges_to_json(s.valid_neg);
    j["test_missing"] = edges_to_json(s.test_missing);
    j["test_neg"] = edges_to_json(s.test_neg);
    return j;
}

inline Split split_from_json(const json& j) {
    Split s;
    try {
        s.num_nodes = j.at("num_nodes").get<std::size_t>();
        s.r_m = j.at("r_m").get<double>();
        s.r_valid = j.at("r_valid").get<double>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.train_edges = edges_from_json(j.at("train_edges"));
        s.valid_missing = edges_from_json(j.at("valid_missing"));
        s.valid_neg = edges_from_json(j.at("valid_neg"));
        s.test_missing = edges_from_json(j.at("test_missing"));
        s.test_neg = edges_from_json(j.at("test_neg"));
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("bad split JSON: ") + e.what());
    }
    return s;
}

inline void save_split(const std::string& path, const Split& s) {
    atomic_write_file(path, split_to_json(s).dump(2) + "\n");
}

inline Split load_split(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("bad split JSON: ") + e.what());
    }
    return split_from_json(j);
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Eigen::MatrixXd matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw ArgumentError("matrix data length mismatch");
    Eigen::MatrixXd m(rows, cols);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j2 = 0; j2 < cols; ++j2) m(i, j2) = data[k++].get<double>();
    return m;
}

inline json checkpoint_to_json(const ModelParams& p, std::uint64_t seed) {
    json j;
    j["hidden"] = p.hidden_dim();
    j["seed"] = seed;
    j["w1"] = matrix_to_json(p.w1);
    j["w2"] = matrix_to_json(p.w2);
    return j;
}

inline ModelParams checkpoint_from_json(const json& j) {
    ModelParams p;
    try {
        p.w1 = matrix_from_json(j.at("w1"));
        p.w2 = matrix_from_json(j.at("w2"));
        if (j.at("hidden").get<Eigen::Index>() != p.w1.cols())
            throw ArgumentError("checkpoint hidden width mismatch");
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("bad checkpoint JSON: ") + e.what());
    }
    return p;
}

inline void save_checkpoint(const std::string& path, const ModelParams& p, std::uint64_t seed) {
    atomic_write_file(path, checkpoint_to_json(p, seed).dump(2) + "\n");
}

inline ModelParams load_checkpoint(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("bad checkpoint JSON: ") + e.what());
    }
    return checkpoint_from_json(j);
}

inline std::string history_csv(const TrainHistory& h) {
    std::string out;
    if (!h.outer.empty() || h.epochs.empty()) {
        out += "iteration,K,num_selected,loss_le_prime,loss_lc,valid_auroc,valid_auprc\n";
        for (const OuterRecord& r : h.outer) {
            out += std::to_string(r.iteration) + "," + format_g17(r.k) + "," +
                   std::to_string(r.num_selected) + "," + format_g17(r.loss_le_prime) + "," +
                   format_g17(r.loss_lc) + "," + format_g17(r.valid_auroc) + "," +
                   format_g17(r.valid_auprc) + "\n";
        }
    } else {
        out += "epoch,loss,valid_auroc,valid_auprc\n";
        for (const EpochRecord& r : h.epochs) {
            out += std::to_string(r.epoch) + "," + format_g17(r.loss) + "," +
                   format_g17(r.valid_auroc) + "," + format_g17(r.valid_auprc) + "\n";
        }
    }
    return out;
}

inline void save_history(const std::string& path, const TrainHistory& h) {
    atomic_write_file(path, history_csv(h));
}

struct MetricsReport {
    std::string method;
    std::uint64_t seed = 0;
    double r_m = 0.0;
    double test_auroc = 0.0;
    double test_auprc = 0.0;
    // Diagnostic when propagation at test time uses G_P instead of G_bar'.
    double test_auroc_gp = 0.0;
    double test_auprc_gp = 0.0;
    std::vector<double> valid_auroc_curve;
    std::vector<double> valid_auprc_curve;
    double wall_clock_seconds = 0.0;
    json config_echo;
};

inline json report_to_json(const MetricsReport& r) {
    json j;
    j["method"] = r.method;
    j["seed"] = r.seed;
    j["r_m"] = r.r_m;
    j["test_auroc"] = r.test_auroc;
    j["test_auprc"] = r.test_auprc;
    j["test_auroc_gp"] = r.test_auroc_gp;
    j["test_auprc_gp"] = r.test_auprc_gp;
    j["valid_auroc_curve"] = r.valid_auroc_curve;
    j["valid_auprc_curve"] = r.valid_auprc_curve;
    j["wall_clock_seconds"] = r.wall_clock_seconds;
    j["config"] = r.config_echo;
    return j;
}

inline MetricsReport report_from_json(const json& j) {
    MetricsReport r;
    try {
        r.method = j.at("method").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.r_m = j.at("r_m").get<double>();
        r.test_auroc = j.at("test_auroc").get<double>();
        r.test_auprc = j.at("test_auprc").get<double>();
        r.test_auroc_gp = j.at("test_auroc_gp").get<double>();
        r.test_auprc_gp = j.at("test_auprc_gp").get<double>();
        r.valid_auroc_curve = j.at("valid_auroc_curve").get<std::vector<double>>();
        r.valid_auprc_curve = j.at("valid_auprc_curve").get<std::vector<double>>();
        r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
        r.config_echo = j.at("config");
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("bad report JSON: ") + e.what());
    }
    return r;
}

} // namespace pull
