#pragma once

// The PU objective. L_E is the full cross entropy over positives, selected
// pseudo-labeled pairs, and the remaining unlabeled pairs; L_E' is its
// class-balanced sampled variant; L_C is the correction term whose scores
// must come from propagation over the observed graph. Losses are sums, not
// means. Probabilities are clamped to [1e-12, 1-1e-12] before log().

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pull/errors.hpp"
#include "pull/gcn.hpp"
#include "pull/graph.hpp"
#include "pull/rng.hpp"

namespace pull {

inline constexpr double kProbClamp = 1e-12;

struct LossStats {
    std::size_t clamped = 0;
};

inline double clamp_prob(double p, LossStats* stats) {
    if (p < kProbClamp) {
        if (stats) ++stats->clamped;
        return kProbClamp;
    }
    if (p > 1.0 - kProbClamp) {
        if (stats) ++stats->clamped;
        return 1.0 - kProbClamp;
    }
    return p;
}

// -(y log p + (1-y) log(1-p)) with fractional labels allowed.
inline double bce_term(double yhat, double label, LossStats* stats = nullptr) {
    const double p = clamp_prob(yhat, stats);
    double out = 0.0;
    if (label > 0.0) out -= label * std::log(p);
    if (label < 1.0) out -= (1.0 - label) * std::log(1.0 - p);
    return out;
}

inline std::vector<double> gather_scores(const Eigen::MatrixXd& h, const std::vector<Edge>& pairs) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const Edge& e : pairs) out.push_back(score(h, e.u, e.v));
    return out;
}

// Full L_E: positives with label 1, pseudo-labeled pairs with their expected
// weights, and every remaining unlabeled pair with label 0.
inline double loss_le_full(const std::vector<double>& yhat_positives,
                           const std::vector<std::pair<double, double>>& pseudo_yhat_label,
                           const std::vector<double>& yhat_unlabeled,
                           LossStats* stats = nullptr) {
    double loss = 0.0;
    for (double y : yhat_positives) loss += bce_term(y, 1.0, stats);
    for (double y : yhat_unlabeled) loss += bce_term(y, 0.0, stats);
    for (const auto& [y, a] : pseudo_yhat_label) {
        if (!(a >= 0.0 && a <= 1.0)) throw ArgumentError("pseudo label outside [0,1]");
        loss += bce_term(y, a, stats);
    }
    return loss;
}

// One epoch's sampled sets. Pseudo pairs carry their expected-graph weights
// as labels; the two negative sets come from the unlabeled remainder and
// never clash with a differently-labeled pair.
struct LossBatch {
    std::vector<Edge> positives;                    // E_P
    std::vector<std::pair<Edge, double>> pseudo;    // selected pairs with labels
    std::vector<Edge> negatives_le;                 // |E_P| + |selected| sampled non-members
    std::vector<Edge> negatives_lc;                 // |E_P| sampled non-members
    std::uint64_t resample_seed = 0;
};

inline void validate_batch(const LossBatch& b, bool lc_required = true) {
    if (b.negatives_le.size() != b.positives.size() + b.pseudo.size())
        throw ArgumentError("|E_U'| must equal |E_P| + |E_P^r|");
    if (lc_required && b.negatives_lc.size() != b.positives.size())
        throw ArgumentError("|E_U''| must equal |E_P|");
    std::unordered_map<std::uint64_t, double> label_of;
    auto add = [&](const Edge& e, double label, const char* set_name) {
        auto [it, fresh] = label_of.try_emplace(edge_key(e), label);
        if (!fresh && it->second != label)
            throw ArgumentError(std::string("pair with two labels in one batch (") + set_name + ")");
    };
    for (const Edge& e : b.positives) add(e, 1.0, "positives");
    for (const auto& [e, a] : b.pseudo) add(e, a, "pseudo");
    for (const Edge& e : b.negatives_le) add(e, 0.0, "negatives_le");
    for (const Edge& e : b.negatives_lc) add(e, 0.0, "negatives_lc");
}

// L_E': the full loss with the unlabeled remainder replaced by the sampled
// balanced set. Scores must come from propagation over the expected graph.
inline double loss_le_prime(const Eigen::MatrixXd& h_gbar, const LossBatch& batch,
                            LossStats* stats = nullptr) {
    validate_batch(batch, /*lc_required=*/false);
    std::vector<std::pair<double, double>> pseudo;
    pseudo.reserve(batch.pseudo.size());
    for (const auto& [e, a] : batch.pseudo) pseudo.emplace_back(score(h_gbar, e.u, e.v), a);
    return loss_le_full(gather_scores(h_gbar, batch.positives), pseudo,
                        gather_scores(h_gbar, batch.negatives_le), stats);
}

// L_C: BCE over observed edges and |E_P| sampled non-members, with scores
// from propagation over the observed graph G_P (not the expected graph).
inline double loss_lc(const Eigen::MatrixXd& h_gp, const std::vector<Edge>& positives,
                      const std::vector<Edge>& negatives_lc, LossStats* stats = nullptr) {
    if (negatives_lc.size() != positives.size())
        throw ArgumentError("|E_U''| must equal |E_P|");
    double loss = 0.0;
    for (double y : gather_scores(h_gp, positives)) loss += bce_term(y, 1.0, stats);
    for (double y : gather_scores(h_gp, negatives_lc)) loss += bce_term(y, 0.0, stats);
    return loss;
}

// Uniform draw of `count` distinct pairs from the unlabeled remainder
// E_U^r = non-edges of gp minus the selected set.
inline std::vector<Edge> sample_unlabeled_remainder(const Graph& gp,
                                                    const std::unordered_set<std::uint64_t>& selected_keys,
                                                    std::size_t count, std::uint64_t seed) {
    const std::size_t n = gp.num_nodes();
    const std::size_t total_pairs = n * (n - 1) / 2;
    if (total_pairs < gp.num_edges() + selected_keys.size() + count)
        throw CapacityError("not enough unlabeled pairs to sample");
    if (count == 0) return {};

    Rng rng(seed);
    std::vector<Edge> out;
    out.reserve(count);
    std::unordered_set<std::uint64_t> drawn;
    drawn.reserve(count);
    const std::size_t available = total_pairs - gp.num_edges() - selected_keys.size();
    if (available < 4 * count) {
        std::vector<Edge> pool;
        pool.reserve(available);
        for (NodeId u = 0; u + 1 < n; ++u)
            for (NodeId v = u + 1; v < n; ++v) {
                const Edge e{u, v};
                if (!gp.has_edge(u, v) && !selected_keys.contains(edge_key(e))) pool.push_back(e);
            }
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(pool.size() - i));
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
    } else {
        while (out.size() < count) {
            const NodeId a = static_cast<NodeId>(rng.uniform_index(n));
            const NodeId b = static_cast<NodeId>(rng.uniform_index(n));
            if (a == b) continue;
            const Edge e = make_edge(a, b);
            const std::uint64_t key = edge_key(e);
            if (gp.has_edge(e.u, e.v) || selected_keys.contains(key) || drawn.contains(key)) continue;
            drawn.insert(key);
            out.push_back(e);
        }
    }
    return out;
}

// Per-epoch batch for iteration `outer`, epoch `epoch`. E_U' and E_U'' are
// resampled every epoch from distinct derived streams.
inline LossBatch make_loss_batch(const Graph& gp, const std::vector<std::pair<Edge, double>>& selected,
                                 std::uint64_t master_seed, std::uint64_t outer, std::uint64_t epoch,
                                 bool with_lc) {
    std::unordered_set<std::uint64_t> selected_keys;
    selected_keys.reserve(selected.size());
    for (const auto& [e, a] : selected) selected_keys.insert(edge_key(e));

    LossBatch b;
    b.positives = gp.edges();
    b.pseudo = selected;
    b.resample_seed = derive_seed(master_seed, "train/le-neg", outer, epoch);
    b.negatives_le = sample_unlabeled_remainder(gp, selected_keys,
                                                b.positives.size() + selected.size(), b.resample_seed);
    if (with_lc)
        b.negatives_lc = sample_unlabeled_remainder(
            gp, selected_keys, b.positives.size(),
            derive_seed(master_seed, "train/lc-neg", outer, epoch));
    return b;
}

} // namespace pull
