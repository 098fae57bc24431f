#pragma once

// End-to-end runs behind the CLI: config parsing and validation, method
// dispatch, artifact emission, the oracle check suite on random tiny
// instances, and the runtime scaling benchmark.

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "pull/errors.hpp"
#include "pull/expectation.hpp"
#include "pull/gcn.hpp"
#include "pull/graph.hpp"
#include "pull/io.hpp"
#include "pull/metrics.hpp"
#include "pull/oracle.hpp"
#include "pull/serialize.hpp"
#include "pull/splitter.hpp"
#include "pull/trainer.hpp"

namespace pull {

struct RunConfig {
    std::string edges_path;
    std::string features_path;
    std::string split_path; // optional; empty -> split derived from ratios
    std::string output_dir;
    std::string method = "pull"; // pull | pull-ws | pull-no-lc | gcn-ce
    double r_m = 0.1;
    double r_valid = 0.1;
    TrainConfig train;
};

inline bool verbose_enabled() {
    const char* v = std::getenv("PULL_VERBOSE");
    return v != nullptr && std::string(v) != "0" && std::string(v) != "";
}

inline RunConfig run_config_from_json(const json& j) {
    static const std::vector<std::string> known = {
        "edges", "features", "split", "output_dir", "method", "seed", "r_m", "r_valid",
        "inner_epochs", "max_outer", "lr", "hidden", "r", "m", "no_early_stop",
        "baseline_max_epochs", "baseline_patience", "baseline_min_epoch"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ArgumentError("unknown config key: " + key);
    }
    RunConfig c;
    try {
        c.edges_path = j.at("edges").get<std::string>();
        c.features_path = j.at("features").get<std::string>();
        c.output_dir = j.at("output_dir").get<std::string>();
        c.method = j.value("method", c.method);
        c.split_path = j.value("split", std::string());
        c.train.seed = j.value("seed", std::uint64_t{0});
        c.r_m = j.value("r_m", c.r_m);
        c.r_valid = j.value("r_valid", c.r_valid);
        c.train.inner_epochs = j.value("inner_epochs", c.train.inner_epochs);
        c.train.max_outer = j.value("max_outer", c.train.max_outer);
        c.train.lr = j.value("lr", c.train.lr);
        c.train.hidden = j.value("hidden", c.train.hidden);
        c.train.r = j.value("r", c.train.r);
        c.train.m = j.value("m", c.train.m);
        c.train.no_early_stop = j.value("no_early_stop", false);
        c.train.baseline_max_epochs = j.value("baseline_max_epochs", c.train.baseline_max_epochs);
        c.train.baseline_patience = j.value("baseline_patience", c.train.baseline_patience);
        c.train.baseline_min_epoch = j.value("baseline_min_epoch", c.train.baseline_min_epoch);
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("bad config: ") + e.what());
    }
    if (c.method != "pull" && c.method != "pull-ws" && c.method != "pull-no-lc" && c.method != "gcn-ce")
        throw ArgumentError("unknown method: " + c.method);
    c.train.ablate_lc = (c.method == "pull-no-lc");
    c.train.weighted_sampling = (c.method == "pull-ws");
    return c;
}

inline json run_config_to_json(const RunConfig& c) {
    json j;
    j["edges"] = c.edges_path;
    j["features"] = c.features_path;
    if (!c.split_path.empty()) j["split"] = c.split_path;
    j["output_dir"] = c.output_dir;
    j["method"] = c.method;
    j["seed"] = c.train.seed;
    j["r_m"] = c.r_m;
    j["r_valid"] = c.r_valid;
    j["inner_epochs"] = c.train.inner_epochs;
    j["max_outer"] = c.train.max_outer;
    j["lr"] = c.train.lr;
    j["hidden"] = c.train.hidden;
    j["r"] = c.train.r;
    j["m"] = c.train.m;
    j["no_early_stop"] = c.train.no_early_stop;
    j["baseline_max_epochs"] = c.train.baseline_max_epochs;
    j["baseline_patience"] = c.train.baseline_patience;
    j["baseline_min_epoch"] = c.train.baseline_min_epoch;
    return j;
}

// Loads data, trains the configured method, writes checkpoint/history/report
// (and the final expected graph for PULL variants) into output_dir, and
// returns the report. On NumericError the partial history is still written
// before the error propagates.
inline MetricsReport run_experiment(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    const auto t0 = std::chrono::steady_clock::now();

    const EdgeListFile ef = load_edge_list(cfg.edges_path);
    const Eigen::MatrixXd x = load_features(cfg.features_path);
    const std::size_t n = static_cast<std::size_t>(x.rows());
    if (ef.min_num_nodes > n)
        throw ArgumentError("edge file references node beyond feature matrix");
    const Graph full(n, ef.edges);

    const Split split = cfg.split_path.empty()
                            ? make_split(full, cfg.r_m, cfg.r_valid, cfg.train.seed)
                            : load_split(cfg.split_path);
    if (split.num_nodes != n) throw ArgumentError("split node count does not match features");
    const Graph train_graph(n, split.train_edges);

    MetricsReport report;
    report.method = cfg.method;
    report.seed = cfg.train.seed;
    report.r_m = split.r_m;
    report.config_echo = run_config_to_json(cfg);

    const fs::path out(cfg.output_dir);
    fs::create_directories(out);

    TrainHistory history;
    try {
        const WeightedGraph gp_unit = WeightedGraph::unit(train_graph);
        if (cfg.method == "gcn-ce") {
            const BaselineResult res = train_baseline_gcn_ce(train_graph, x, split, cfg.train, history);
            if (!split.test_missing.empty()) {
                const Metrics m = evaluate_checkpoint(res.params, x, gp_unit, split.test_missing,
                                                      split.test_neg);
                report.test_auroc = report.test_auroc_gp = m.auroc;
                report.test_auprc = report.test_auprc_gp = m.auprc;
            }
            for (const EpochRecord& r : history.epochs) {
                report.valid_auroc_curve.push_back(r.valid_auroc);
                report.valid_auprc_curve.push_back(r.valid_auprc);
            }
            save_checkpoint((out / "checkpoint.json").string(), res.params, cfg.train.seed);
        } else {
            const PullResult res = train_pull(train_graph, x, split, cfg.train, history);
            if (!split.test_missing.empty()) {
                const Metrics m_gbar = evaluate_checkpoint(res.params, x, res.gbar,
                                                           split.test_missing, split.test_neg);
                const Metrics m_gp = evaluate_checkpoint(res.params, x, gp_unit,
                                                         split.test_missing, split.test_neg);
                report.test_auroc = m_gbar.auroc;
                report.test_auprc = m_gbar.auprc;
                report.test_auroc_gp = m_gp.auroc;
                report.test_auprc_gp = m_gp.auprc;
            }
            for (const OuterRecord& r : history.outer) {
                report.valid_auroc_curve.push_back(r.valid_auroc);
                report.valid_auprc_curve.push_back(r.valid_auprc);
            }
            save_checkpoint((out / "checkpoint.json").string(), res.params, cfg.train.seed);
            save_weighted_graph_tsv((out / "gbar.tsv").string(), res.gbar);
        }
    } catch (const NumericError&) {
        save_history((out / "history.csv").string(), history);
        throw;
    }
    save_history((out / "history.csv").string(), history);

    if (history.clamp_events > 0)
        std::cerr << "warning: " << history.clamp_events
                  << " probabilities clamped to (1e-12, 1-1e-12) before log()\n";
    if (verbose_enabled()) {
        for (const OuterRecord& r : history.outer)
            std::cerr << "iteration " << r.iteration << ": K=" << format_g17(r.k)
                      << " selected=" << r.num_selected << " valid_auroc=" << r.valid_auroc << "\n";
        if (!history.epochs.empty())
            std::cerr << "epochs run: " << history.epochs.size()
                      << " best epoch: " << history.best_iteration << "\n";
    }

    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    atomic_write_file((out / "report.json").string(), report_to_json(report).dump(2) + "\n");
    return report;
}

// ---- Oracle check suite -------------------------------------------------

struct OracleCheck {
    std::string name;
    std::string instance;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct OracleReport {
    std::uint64_t seed = 0;
    int trials = 0;
    std::vector<OracleCheck> checks;
    bool all_pass = true;
    bool self_test_detected = false;
};

// Random tiny instance exercising the real pipeline: expected weights over
// the complete candidate set (M = N makes candidates the whole complement).
struct OracleInstance {
    Graph graph;
    Eigen::MatrixXd x;
    ModelParams theta;
    ModelParams theta_new;
    NodePotentialTable table;
    EnumerationProblem problem;
};

inline OracleInstance make_oracle_instance(std::uint64_t trial_seed, std::size_t max_unlabeled = 12) {
    Rng rng(trial_seed);
    const std::size_t n = 4 + rng.uniform_index(3); // 4..6 nodes
    std::vector<Edge> all_pairs;
    for (NodeId u = 0; u + 1 < n; ++u)
        for (NodeId v = u + 1; v < n; ++v) all_pairs.push_back(Edge{u, v});
    rng.shuffle(all_pairs);

    const std::size_t max_u = std::min(max_unlabeled, all_pairs.size() - 1);
    const std::size_t num_unlabeled = 2 + rng.uniform_index(max_u - 1); // 2..max_u
    std::vector<Edge> observed(all_pairs.begin() + num_unlabeled, all_pairs.end());

    Graph g(n, std::move(observed));
    const Eigen::Index d = 3, h = 4;
    Eigen::MatrixXd x(n, d);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.normal();

    ModelParams theta = init_params(derive_seed(trial_seed, "oracle/theta"), d, h);
    ModelParams theta_new = init_params(derive_seed(trial_seed, "oracle/theta-new"), d, h);

    const std::vector<Edge> candidates = candidate_pairs(g, g.num_nodes());
    NodePotentialTable table = expected_weights(theta, x, g, WeightedGraph::unit(g), candidates);
    EnumerationProblem problem = enumeration_problem_from_table(table);
    return OracleInstance{std::move(g), std::move(x), std::move(theta), std::move(theta_new),
                          std::move(table), std::move(problem)};
}

inline OracleReport run_oracle_checks(std::uint64_t seed, int trials) {
    OracleReport report;
    report.seed = seed;
    report.trials = trials;

    auto add = [&](const std::string& name, const std::string& instance, double residual,
                   double tolerance) {
        const bool pass = residual < tolerance;
        report.checks.push_back({name, instance, residual, tolerance, pass});
        report.all_pass = report.all_pass && pass;
    };

    for (int t = 0; t < trials; ++t) {
        const OracleInstance inst = make_oracle_instance(derive_seed(seed, "oracle/trial",
                                                                     static_cast<std::uint64_t>(t)));
        const std::string tag = "N=" + std::to_string(inst.graph.num_nodes()) +
                                " |EP|=" + std::to_string(inst.graph.num_edges()) +
                                " |EU|=" + std::to_string(inst.problem.unlabeled.size()) +
                                " trial=" + std::to_string(t);

        const NormalizationResiduals lem = check_normalization(inst.problem);
        add("state-sum-normalization", tag, lem.total, 1e-9);
        add("conditional-normalization", tag, lem.max_conditional, 1e-9);

        // Marginal expected weights must equal the potentials entrywise.
        const Eigen::MatrixXd brute = brute_expected_adjacency(inst.problem);
        double max_diff = 0.0;
        for (const PotentialEntry& p : inst.table.entries)
            max_diff = std::max(max_diff, std::abs(brute(p.e.u, p.e.v) - p.phi));
        add("expected-adjacency", tag, max_diff, 1e-12);

        // The EM Q-function must equal the negative loss under expected-graph labels.
        const Eigen::MatrixXd h_new =
            forward(inst.theta_new, inst.x, normalized_adjacency(WeightedGraph::unit(inst.graph)));
        std::vector<double> yhat_obs, yhat_unl;
        for (const Edge& e : inst.problem.observed) yhat_obs.push_back(score(h_new, e.u, e.v));
        for (const Edge& e : inst.problem.unlabeled) yhat_unl.push_back(score(h_new, e.u, e.v));
        const double q = brute_q(inst.problem, yhat_obs, yhat_unl);

        std::vector<std::pair<double, double>> pseudo;
        for (std::size_t i = 0; i < yhat_unl.size(); ++i)
            pseudo.emplace_back(yhat_unl[i], inst.problem.phi[i]);
        const double le_full = loss_le_full(yhat_obs, pseudo, {});
        add("q-function-vs-negative-loss", tag, std::abs(q + le_full), 1e-9);
    }

    // Harness sanity: a deliberately perturbed potential must be caught.
    {
        OracleInstance inst = make_oracle_instance(derive_seed(seed, "oracle/self-test"));
        EnumerationProblem perturbed = inst.problem;
        perturbed.phi[0] = clamp_prob(perturbed.phi[0] + 0.05, nullptr);
        const Eigen::MatrixXd brute = brute_expected_adjacency(perturbed);
        double max_diff = 0.0;
        for (const PotentialEntry& p : inst.table.entries)
            max_diff = std::max(max_diff, std::abs(brute(p.e.u, p.e.v) - p.phi));
        report.self_test_detected = max_diff > 1e-12;
        report.all_pass = report.all_pass && report.self_test_detected;
        report.checks.push_back({"self-test-perturbation", "perturbed phi[0] by 0.05", max_diff,
                                 1e-12, report.self_test_detected});
    }
    return report;
}

inline json oracle_report_to_json(const OracleReport& r) {
    json checks = json::array();
    for (const OracleCheck& c : r.checks)
        checks.push_back(json{{"name", c.name},
                              {"instance", c.instance},
                              {"residual", c.residual},
                              {"tolerance", c.tolerance},
                              {"pass", c.pass}});
    return json{{"seed", r.seed},
                {"trials", r.trials},
                {"checks", std::move(checks)},
                {"all_pass", r.all_pass},
                {"self_test_detected", r.self_test_detected}};
}

// ---- Scaling benchmark ---------------------------------------------------

struct BenchRow {
    std::size_t edges = 0;
    double seconds = 0.0;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    double r_squared = 0.0;
    bool r_squared_defined = false;
};

// Least-squares fit seconds ~ a + b*edges.
inline void fit_r_squared(BenchResult& res) {
    const std::size_t n = res.rows.size();
    if (n < 2) {
        res.r_squared_defined = false;
        return;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const BenchRow& r : res.rows) {
        const double x = static_cast<double>(r.edges);
        sx += x;
        sy += r.seconds;
        sxx += x * x;
        sxy += x * r.seconds;
    }
    const double dn = static_cast<double>(n);
    const double denom = dn * sxx - sx * sx;
    if (denom == 0.0) {
        res.r_squared_defined = false;
        return;
    }
    const double b = (dn * sxy - sx * sy) / denom;
    const double a = (sy - b * sx) / dn;
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / dn;
    for (const BenchRow& r : res.rows) {
        const double x = static_cast<double>(r.edges);
        ss_res += (r.seconds - (a + b * x)) * (r.seconds - (a + b * x));
        ss_tot += (r.seconds - mean_y) * (r.seconds - mean_y);
    }
    if (ss_tot == 0.0) {
        res.r_squared_defined = false;
        return;
    }
    res.r_squared = 1.0 - ss_res / ss_tot;
    res.r_squared_defined = true;
}

// For each portion, train PULL with a fixed small budget (n_o=3, n_i=50,
// no gate) on the subgraph induced by the first floor(r_p*|E|) edges of one
// seeded shuffle, and record wall-clock seconds.
inline BenchResult run_bench_scaling(const Graph& g, const Eigen::MatrixXd& x,
                                     const std::vector<double>& portions, std::uint64_t seed) {
    for (double p : portions)
        if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("portions must lie in (0,1]");

    std::vector<Edge> shuffled = g.edges();
    Rng rng(derive_seed(seed, "bench/subsample"));
    rng.shuffle(shuffled);

    BenchResult res;
    for (double p : portions) {
        const auto m = static_cast<std::size_t>(std::floor(p * static_cast<double>(g.num_edges())));
        std::vector<Edge> sub(shuffled.begin(), shuffled.begin() + m);
        const Graph graph_p(g.num_nodes(), std::move(sub));

        Split split;
        split.train_edges = graph_p.edges();
        split.seed = seed;
        split.num_nodes = g.num_nodes();

        TrainConfig cfg;
        cfg.inner_epochs = 50;
        cfg.max_outer = 3;
        cfg.no_early_stop = true;
        cfg.seed = seed;

        const auto t0 = std::chrono::steady_clock::now();
        train_pull(graph_p, x, split, cfg);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        res.rows.push_back({m, secs});
    }
    fit_r_squared(res);
    return res;
}

inline std::string bench_csv(const BenchResult& res) {
    std::string out = "edges,seconds\n";
    for (const BenchRow& r : res.rows)
        out += std::to_string(r.edges) + "," + format_g17(r.seconds) + "\n";
    return out;
}

} // namespace pull
