#pragma once

// Outer training loop: expectation of the graph structure, top-K (or WS)
// approximation, K growth, inner Adam epochs on L = L_E' + L_C, and a
// validation-AUROC gate. Also the GCN+CE baseline trainer and checkpoint
// evaluation.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_set>
#include <vector>

#include "pull/errors.hpp"
#include "pull/expectation.hpp"
#include "pull/gcn.hpp"
#include "pull/graph.hpp"
#include "pull/losses.hpp"
#include "pull/metrics.hpp"
#include "pull/splitter.hpp"

namespace pull {

struct TrainConfig {
    int inner_epochs = 200;
    int max_outer = 10;
    double lr = 0.01;
    int hidden = 16;
    double r = 0.05;
    std::size_t m = 100; // clamped to N for small graphs
    std::uint64_t seed = 0;
    bool ablate_lc = false;         // train on L_E' only
    bool weighted_sampling = false; // PULL-WS approximation (implies no L_C)
    bool no_early_stop = false;     // always run max_outer iterations
    int baseline_max_epochs = 2000;
    int baseline_patience = 20;
    int baseline_min_epoch = 500;
};

struct OuterRecord {
    int iteration = 0;       // 1-based
    double k = 0.0;          // budget used for this iteration's selection
    std::size_t num_selected = 0;
    double loss_le_prime = 0.0; // last inner epoch
    double loss_lc = 0.0;
    double valid_auroc = 0.0;
    double valid_auprc = 0.0;
};

struct EpochRecord {
    int epoch = 0; // 1-based
    double loss = 0.0;
    double valid_auroc = 0.0;
    double valid_auprc = 0.0;
};

struct TrainHistory {
    std::vector<OuterRecord> outer;  // PULL iterations
    std::vector<EpochRecord> epochs; // baseline loss curve
    double final_k = 0.0;            // K after the last update
    int best_iteration = 0;          // 1-based; 0 when not applicable
    bool lc_ablated = false;
    std::size_t clamp_events = 0;    // probabilities clamped before log()
};

struct PullResult {
    ModelParams params;
    WeightedGraph gbar;
    TrainHistory history;
};

struct BaselineResult {
    ModelParams params;
    TrainHistory history;
};

inline Metrics evaluate_checkpoint(const ModelParams& params, const Eigen::MatrixXd& x,
                                   const WeightedGraph& prop_graph,
                                   const std::vector<Edge>& positives,
                                   const std::vector<Edge>& negatives) {
    if (positives.empty() || negatives.empty())
        throw ArgumentError("evaluation needs positives and negatives");
    const PropagationOperator prop = normalized_adjacency(prop_graph);
    const Eigen::MatrixXd h = forward(params, x, prop);
    std::vector<double> scores;
    std::vector<int> labels;
    scores.reserve(positives.size() + negatives.size());
    for (const Edge& e : positives) {
        scores.push_back(score(h, e.u, e.v));
        labels.push_back(1);
    }
    for (const Edge& e : negatives) {
        scores.push_back(score(h, e.u, e.v));
        labels.push_back(0);
    }
    return ranking_metrics(scores, labels);
}

namespace detail {

inline std::vector<PairTerm> le_prime_terms(const LossBatch& b) {
    std::vector<PairTerm> terms;
    terms.reserve(b.positives.size() + b.pseudo.size() + b.negatives_le.size());
    for (const Edge& e : b.positives) terms.push_back({e, 1.0, 1.0});
    for (const auto& [e, a] : b.pseudo) terms.push_back({e, a, 1.0});
    for (const Edge& e : b.negatives_le) terms.push_back({e, 0.0, 1.0});
    return terms;
}

inline std::vector<PairTerm> lc_terms(const LossBatch& b) {
    std::vector<PairTerm> terms;
    terms.reserve(b.positives.size() + b.negatives_lc.size());
    for (const Edge& e : b.positives) terms.push_back({e, 1.0, 1.0});
    for (const Edge& e : b.negatives_lc) terms.push_back({e, 0.0, 1.0});
    return terms;
}

} // namespace detail

// Algorithm: init theta and K=|E_P|, G_bar' = G_P; each iteration recomputes
// the expected weights with the latest parameters, re-selects floor(K)-|E_P|
// candidates, grows K by r|E_P|, then runs `inner_epochs` Adam steps on
// L_E' + L_C (L_C propagates over G_P; L_E' over G_bar'). Stops early when
// validation AUROC drops below the previous iteration's. Returns the
// parameters and G_bar' of the best-validation iteration (ties: earliest).
// `history` is filled incrementally and survives a NumericError abort.
inline PullResult train_pull(const Graph& gp, const Eigen::MatrixXd& x, const Split& split,
                             const TrainConfig& cfg, TrainHistory& history) {
    if (static_cast<std::size_t>(x.rows()) != gp.num_nodes())
        throw ArgumentError("feature rows do not match graph");
    if (gp.num_edges() == 0) throw ArgumentError("training graph has no edges");
    if (gp.edges() != split.train_edges)
        throw ArgumentError("graph edges do not match split.train_edges");

    history = TrainHistory{};
    history.lc_ablated = cfg.ablate_lc || cfg.weighted_sampling;
    const bool with_lc = !history.lc_ablated;
    const bool has_valid = !split.valid_missing.empty() && !split.valid_neg.empty();

    ModelParams params = init_params(cfg.seed, x.cols(), cfg.hidden);
    const std::vector<Edge> candidates = candidate_pairs(gp, std::min(cfg.m, gp.num_nodes()));
    ExpectationConfig ecfg;
    ecfg.r = cfg.r;
    ecfg.m = cfg.m;
    ecfg.k0 = static_cast<double>(gp.num_edges());

    WeightedGraph gbar = WeightedGraph::unit(gp);
    const PropagationOperator gp_prop = normalized_adjacency(gbar);
    const PropagatedFeatures pf_gp = precompute_features(gp_prop, x);

    std::optional<PullResult> best;
    double best_auroc = -std::numeric_limits<double>::infinity();
    double prev_auroc = -std::numeric_limits<double>::infinity();
    AdamState adam(params, cfg.lr); // one optimizer across all outer iterations

    for (int iter = 1; iter <= cfg.max_outer; ++iter) {
        const double k_now = ecfg.k();
        const NodePotentialTable table = expected_weights(params, x, gp, gbar, candidates);
        Approximation approx =
            cfg.weighted_sampling
                ? approximate_weighted_sample(table, k_now,
                                              derive_seed(cfg.seed, "train/ws-select",
                                                          static_cast<std::uint64_t>(iter)))
                : approximate_topk(table, k_now);
        gbar = approx.graph;
        k_update(ecfg);

        const PropagationOperator gbar_prop = normalized_adjacency(gbar);
        const PropagatedFeatures pf_gbar = precompute_features(gbar_prop, x);

        double last_le = 0.0, last_lc = 0.0;
        LossStats stats;
        for (int epoch = 1; epoch <= cfg.inner_epochs; ++epoch) {
            const LossBatch batch =
                make_loss_batch(gp, approx.selected, cfg.seed, static_cast<std::uint64_t>(iter),
                                static_cast<std::uint64_t>(epoch), with_lc);
            const Eigen::MatrixXd h_gbar = forward(params, pf_gbar);
            last_le = loss_le_prime(h_gbar, batch, &stats);
            Gradients grads = backward(params, pf_gbar, detail::le_prime_terms(batch));
            if (with_lc) {
                const Eigen::MatrixXd h_gp = forward(params, pf_gp);
                last_lc = loss_lc(h_gp, batch.positives, batch.negatives_lc, &stats);
                grads += backward(params, pf_gp, detail::lc_terms(batch));
            }
            if (!std::isfinite(last_le) || !std::isfinite(last_lc))
                throw NumericError("non-finite loss at iteration " + std::to_string(iter));
            adam_step(params, grads, adam);
        }
        history.clamp_events += stats.clamped;

        OuterRecord rec;
        rec.iteration = iter;
        rec.k = k_now;
        rec.num_selected = approx.selected.size();
        rec.loss_le_prime = last_le;
        rec.loss_lc = last_lc;
        if (has_valid) {
            const Metrics m = evaluate_checkpoint(params, x, gbar, split.valid_missing, split.valid_neg);
            rec.valid_auroc = m.auroc;
            rec.valid_auprc = m.auprc;
        } else {
            rec.valid_auroc = std::numeric_limits<double>::quiet_NaN();
            rec.valid_auprc = std::numeric_limits<double>::quiet_NaN();
        }
        history.outer.push_back(rec);
        history.final_k = ecfg.k();

        if (!has_valid || rec.valid_auroc > best_auroc) {
            best_auroc = rec.valid_auroc;
            best = PullResult{params, gbar, {}};
            history.best_iteration = iter;
        }
        if (has_valid && !cfg.no_early_stop && rec.valid_auroc < prev_auroc) break;
        prev_auroc = rec.valid_auroc;
    }

    best->history = history;
    return std::move(*best);
}

inline PullResult train_pull(const Graph& gp, const Eigen::MatrixXd& x, const Split& split,
                             const TrainConfig& cfg) {
    TrainHistory history;
    return train_pull(gp, x, split, cfg, history);
}

// GCN+CE baseline: per epoch, resample |E_P| non-edges and minimize BCE over
// positives plus samples with propagation over G_P. Early stopping on valid
// AUROC with the configured patience, never before `baseline_min_epoch`;
// returns the best-validation parameters.
inline BaselineResult train_baseline_gcn_ce(const Graph& gp, const Eigen::MatrixXd& x,
                                            const Split& split, const TrainConfig& cfg,
                                            TrainHistory& history) {
    if (static_cast<std::size_t>(x.rows()) != gp.num_nodes())
        throw ArgumentError("feature rows do not match graph");
    if (split.valid_missing.empty() || split.valid_neg.empty())
        throw ArgumentError("baseline requires a validation set");

    history = TrainHistory{};
    ModelParams params = init_params(cfg.seed, x.cols(), cfg.hidden);
    const WeightedGraph unit = WeightedGraph::unit(gp);
    const PropagationOperator prop = normalized_adjacency(unit);
    const PropagatedFeatures pf = precompute_features(prop, x);

    AdamState adam(params, cfg.lr);
    ModelParams best_params = params;
    double best_auroc = -std::numeric_limits<double>::infinity();
    int best_epoch = 0, stale = 0;
    const std::unordered_set<std::uint64_t> no_exclusions;

    for (int epoch = 1; epoch <= cfg.baseline_max_epochs; ++epoch) {
        const std::vector<Edge> negs = sample_unlabeled_remainder(
            gp, no_exclusions, gp.num_edges(),
            derive_seed(cfg.seed, "baseline/neg", static_cast<std::uint64_t>(epoch)));

        std::vector<PairTerm> terms;
        terms.reserve(2 * gp.num_edges());
        for (const Edge& e : gp.edges()) terms.push_back({e, 1.0, 1.0});
        for (const Edge& e : negs) terms.push_back({e, 0.0, 1.0});

        const Eigen::MatrixXd h = forward(params, pf);
        LossStats stats;
        double loss = 0.0;
        for (const PairTerm& t : terms) loss += bce_term(score(h, t.e.u, t.e.v), t.label, &stats);
        history.clamp_events += stats.clamped;
        if (!std::isfinite(loss)) throw NumericError("non-finite baseline loss");
        adam_step(params, backward(params, pf, terms), adam);

        const Metrics m = evaluate_checkpoint(params, x, unit, split.valid_missing, split.valid_neg);
        history.epochs.push_back({epoch, loss, m.auroc, m.auprc});

        if (m.auroc > best_auroc) {
            best_auroc = m.auroc;
            best_params = params;
            best_epoch = epoch;
            stale = 0;
        } else {
            ++stale;
        }
        if (epoch >= cfg.baseline_min_epoch && stale >= cfg.baseline_patience) break;
    }
    history.best_iteration = best_epoch;
    return BaselineResult{std::move(best_params), history};
}

inline BaselineResult train_baseline_gcn_ce(const Graph& gp, const Eigen::MatrixXd& x,
                                            const Split& split, const TrainConfig& cfg) {
    TrainHistory history;
    return train_baseline_gcn_ce(gp, x, split, cfg, history);
}

} // namespace pull
