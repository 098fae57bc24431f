#pragma once

// Ranking metrics: AUROC as the Mann-Whitney rank statistic with average
// ranks for ties, AUPRC as average precision with tied scores processed as
// one threshold group.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "pull/errors.hpp"

namespace pull {

struct Metrics {
    double auroc = 0.0;
    double auprc = 0.0;
};

inline double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw ArgumentError("scores/labels length mismatch");
    const std::size_t n = scores.size();
    std::size_t pos = 0;
    for (int y : labels) pos += (y != 0);
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) throw ArgumentError("auroc needs at least one positive and one negative");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average rank within each tie group, 1-based ranks.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j); // mean of i+1 .. j
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] != 0) rank_sum_pos += avg_rank;
        i = j;
    }
    const double p = static_cast<double>(pos);
    const double u = rank_sum_pos - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(neg));
}

inline double auprc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw ArgumentError("scores/labels length mismatch");
    const std::size_t n = scores.size();
    std::size_t pos = 0;
    for (int y : labels) pos += (y != 0);
    if (pos == 0) throw ArgumentError("auprc needs at least one positive");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double ap = 0.0;
    double tp = 0.0, fp = 0.0, prev_recall = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] != 0) tp += 1.0;
            else fp += 1.0;
        }
        const double recall = tp / static_cast<double>(pos);
        const double precision = tp / (tp + fp);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return ap;
}

inline Metrics ranking_metrics(const std::vector<double>& scores, const std::vector<int>& labels) {
    return Metrics{auroc(scores, labels), auprc(scores, labels)};
}

} // namespace pull
