#pragma once

// Brute-force enumeration over latent states z for tiny graphs. Verifies
// that the node-potential products form a probability distribution, that the
// marginal expected adjacency equals the potentials entrywise, and that the
// EM Q-function (expected complete-data log likelihood) equals the negative
// full PU loss. Independent of the expectation module's computation path:
// everything here is literal enumeration with compensated summation.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

#include "pull/errors.hpp"
#include "pull/graph.hpp"
#include "pull/losses.hpp"

namespace pull {

// ~1M states; keeps every enumeration below a second.
inline constexpr std::size_t kMaxUnlabeled = 20;

// One assignment over the unlabeled pairs, bit i matching unlabeled[i] in
// ascending pair order. Observed edges are fixed at 1 and not represented.
struct LatentState {
    std::uint32_t bits = 0;

    bool is_linked(std::size_t i) const { return (bits >> i) & 1u; }
};

struct EnumerationProblem {
    std::size_t num_nodes = 0;
    std::vector<Edge> observed;  // E_P
    std::vector<Edge> unlabeled; // E_U in ascending pair order
    std::vector<double> phi;     // phi(z=1 | theta) per unlabeled pair
};

namespace detail {

inline void check_problem(const EnumerationProblem& pr) {
    if (pr.unlabeled.size() != pr.phi.size())
        throw ArgumentError("unlabeled/potential length mismatch");
    if (pr.unlabeled.size() > kMaxUnlabeled)
        throw CapacityError("enumeration capped at " + std::to_string(kMaxUnlabeled) + " unlabeled pairs");
}

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

} // namespace detail

// Table restricted to all of E_U: every non-observed entry becomes an
// unlabeled pair. Throws if the table does not cover the complete pair set.
inline EnumerationProblem enumeration_problem_from_table(const NodePotentialTable& table) {
    EnumerationProblem pr;
    pr.num_nodes = table.num_nodes;
    for (const PotentialEntry& p : table.entries) {
        if (p.observed) {
            pr.observed.push_back(p.e);
        } else {
            pr.unlabeled.push_back(p.e);
            pr.phi.push_back(p.phi);
        }
    }
    const std::size_t total = table.num_nodes * (table.num_nodes - 1) / 2;
    if (pr.observed.size() + pr.unlabeled.size() != total)
        throw ArgumentError("oracle requires potentials over all of E_U");
    detail::check_problem(pr);
    return pr;
}

// All 2^|E_U| states with p(z) = prod phi(z_ij).
inline std::vector<std::pair<LatentState, double>> enumerate_distribution(const EnumerationProblem& pr) {
    detail::check_problem(pr);
    const std::size_t n = pr.unlabeled.size();
    std::vector<std::pair<LatentState, double>> out;
    out.reserve(std::size_t{1} << n);
    for (std::uint32_t bits = 0; bits < (std::uint32_t{1} << n); ++bits) {
        double p = 1.0;
        for (std::size_t i = 0; i < n; ++i)
            p *= ((bits >> i) & 1u) ? pr.phi[i] : (1.0 - pr.phi[i]);
        out.push_back({LatentState{bits}, p});
    }
    return out;
}

struct NormalizationResiduals {
    double total;           // |sum_z p(z) - 1|
    double max_conditional; // max_ij |sum_{z | z_ij=1} prod_{kl != ij} phi - 1|
};

inline NormalizationResiduals check_normalization(const EnumerationProblem& pr) {
    detail::check_problem(pr);
    const std::size_t n = pr.unlabeled.size();

    detail::KahanSum total;
    for (const auto& [state, p] : enumerate_distribution(pr)) total.add(p);
    NormalizationResiduals res{std::abs(total.sum - 1.0), 0.0};

    // Conditional form: fix z_ij = 1, enumerate the remaining bits directly.
    for (std::size_t fixed = 0; fixed < n; ++fixed) {
        detail::KahanSum cond;
        const std::size_t rest = n - 1;
        for (std::uint32_t bits = 0; bits < (std::uint32_t{1} << rest); ++bits) {
            double p = 1.0;
            std::size_t b = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == fixed) continue;
                p *= ((bits >> b) & 1u) ? pr.phi[i] : (1.0 - pr.phi[i]);
                ++b;
            }
            cond.add(p);
        }
        res.max_conditional = std::max(res.max_conditional, std::abs(cond.sum - 1.0));
    }
    return res;
}

// sum_z p(z) A(z), dense. Observed edges contribute 1 in every state.
inline Eigen::MatrixXd brute_expected_adjacency(const EnumerationProblem& pr) {
    detail::check_problem(pr);
    const std::size_t n = pr.unlabeled.size();
    std::vector<detail::KahanSum> acc(n);
    detail::KahanSum total;
    for (const auto& [state, p] : enumerate_distribution(pr)) {
        total.add(p);
        for (std::size_t i = 0; i < n; ++i)
            if (state.is_linked(i)) acc[i].add(p);
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(pr.num_nodes, pr.num_nodes);
    for (const Edge& e : pr.observed) {
        a(e.u, e.v) = total.sum;
        a(e.v, e.u) = total.sum;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Edge& e = pr.unlabeled[i];
        a(e.u, e.v) = acc[i].sum;
        a(e.v, e.u) = acc[i].sum;
    }
    return a;
}

// Q(theta_new | theta) = sum_z p(z|theta) [ sum_{E_P} log yhat
//   + sum_{E_U} log(z yhat + (1-z)(1-yhat)) ], logs clamped as in losses.
// yhat_* hold f_{theta_new} scores aligned with pr.observed / pr.unlabeled.
inline double brute_q(const EnumerationProblem& pr, const std::vector<double>& yhat_observed,
                      const std::vector<double>& yhat_unlabeled) {
    detail::check_problem(pr);
    if (yhat_observed.size() != pr.observed.size() || yhat_unlabeled.size() != pr.unlabeled.size())
        throw ArgumentError("score vectors do not match problem");

    double positive_part = 0.0;
    for (double y : yhat_observed) positive_part += std::log(clamp_prob(y, nullptr));

    const std::size_t n = pr.unlabeled.size();
    std::vector<double> log_linked(n), log_unlinked(n);
    for (std::size_t i = 0; i < n; ++i) {
        log_linked[i] = std::log(clamp_prob(yhat_unlabeled[i], nullptr));
        log_unlinked[i] = std::log(clamp_prob(1.0 - yhat_unlabeled[i], nullptr));
    }

    detail::KahanSum q;
    for (const auto& [state, p] : enumerate_distribution(pr)) {
        double bracket = positive_part;
        for (std::size_t i = 0; i < n; ++i)
            bracket += state.is_linked(i) ? log_linked[i] : log_unlinked[i];
        q.add(p * bracket);
    }
    return q.sum;
}

} // namespace pull
