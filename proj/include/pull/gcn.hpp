#pragma once

// Two-layer graph-convolution encoder with a sigmoid dot-product decoder
// score(i,j) = sigmoid(h_i . h_j), trained by exact reverse-mode gradients
// and Adam. All arithmetic is 64-bit; forward/backward use a fixed summation
// order so identical inputs reproduce identical bits.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

#include "pull/errors.hpp"
#include "pull/graph.hpp"
#include "pull/rng.hpp"

namespace pull {

struct ModelParams {
    Eigen::MatrixXd w1; // d x h
    Eigen::MatrixXd w2; // h x h

    Eigen::Index feature_dim() const { return w1.rows(); }
    Eigen::Index hidden_dim() const { return w1.cols(); }
};

// Glorot-uniform init, bound sqrt(6/(fan_in+fan_out)), seeded per layer.
inline ModelParams init_params(std::uint64_t seed, Eigen::Index d, Eigen::Index h) {
    if (d < 1 || h < 1) throw ArgumentError("feature and hidden dims must be >= 1");
    ModelParams p;
    p.w1.resize(d, h);
    p.w2.resize(h, h);
    auto fill = [](Eigen::MatrixXd& w, std::uint64_t s) {
        Rng rng(s);
        const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j)
                w(i, j) = (2.0 * rng.uniform_real() - 1.0) * bound;
    };
    fill(p.w1, derive_seed(seed, "init/w1"));
    fill(p.w2, derive_seed(seed, "init/w2"));
    return p;
}

// A_hat . X cached per propagation graph; both GCN layers and the W1
// gradient reuse it, so it is the only O(N*d) sparse product per graph.
struct PropagatedFeatures {
    const PropagationOperator* prop = nullptr;
    Eigen::MatrixXd ax; // A_hat * X, N x d
};

inline PropagatedFeatures precompute_features(const PropagationOperator& prop,
                                              const Eigen::MatrixXd& x) {
    if (static_cast<std::size_t>(x.rows()) != prop.num_nodes())
        throw ArgumentError("feature rows do not match node count");
    return PropagatedFeatures{&prop, prop.apply(x)};
}

// H = A_hat . ReLU(A_hat . X . W1) . W2
inline Eigen::MatrixXd forward(const ModelParams& params, const PropagatedFeatures& pf) {
    if (pf.ax.cols() != params.w1.rows()) throw ArgumentError("feature dim does not match W1");
    if (params.w1.cols() != params.w2.rows()) throw ArgumentError("W1/W2 shape mismatch");
    const Eigen::MatrixXd z1 = pf.ax * params.w1;
    const Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
    Eigen::MatrixXd h = pf.prop->apply(a1 * params.w2);
    if (!h.allFinite()) throw NumericError("non-finite embeddings");
    return h;
}

inline Eigen::MatrixXd forward(const ModelParams& params, const Eigen::MatrixXd& x,
                               const PropagationOperator& prop) {
    const PropagatedFeatures pf = precompute_features(prop, x);
    return forward(params, pf);
}

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline double score(const Eigen::MatrixXd& h, NodeId i, NodeId j) {
    if (static_cast<Eigen::Index>(i) >= h.rows() || static_cast<Eigen::Index>(j) >= h.rows())
        throw ArgumentError("node id out of range");
    return sigmoid(h.row(i).dot(h.row(j)));
}

// One weighted BCE term: contributes weight * bce(score(i,j), label).
struct PairTerm {
    Edge e;
    double label = 1.0;  // in [0,1]; pseudo-labels are fractional
    double weight = 1.0;
};

struct Gradients {
    Eigen::MatrixXd w1;
    Eigen::MatrixXd w2;

    Gradients& operator+=(const Gradients& o) {
        w1 += o.w1;
        w2 += o.w2;
        return *this;
    }
};

// Exact gradient of sum_t weight_t * bce(sigmoid(h_i.h_j), label_t) w.r.t.
// W1 and W2. d(bce)/d(logit) = yhat - label, so the backward pass never
// forms the loss itself.
inline Gradients backward(const ModelParams& params, const PropagatedFeatures& pf,
                          const std::vector<PairTerm>& terms) {
    const Eigen::MatrixXd z1 = pf.ax * params.w1;
    const Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
    const Eigen::MatrixXd h = pf.prop->apply(a1 * params.w2);
    if (!h.allFinite()) throw NumericError("non-finite embeddings");

    Eigen::MatrixXd grad_h = Eigen::MatrixXd::Zero(h.rows(), h.cols());
    for (const PairTerm& t : terms) {
        if (static_cast<Eigen::Index>(t.e.v) >= h.rows()) throw ArgumentError("pair out of range");
        if (!(t.label >= 0.0 && t.label <= 1.0)) throw ArgumentError("label outside [0,1]");
        const double yhat = sigmoid(h.row(t.e.u).dot(h.row(t.e.v)));
        const double g = t.weight * (yhat - t.label);
        grad_h.row(t.e.u) += g * h.row(t.e.v);
        grad_h.row(t.e.v) += g * h.row(t.e.u);
    }

    const Eigen::MatrixXd ag = pf.prop->apply(grad_h); // A_hat is symmetric
    Gradients out;
    out.w2 = a1.transpose() * ag;
    Eigen::MatrixXd grad_z1 = ag * params.w2.transpose();
    grad_z1.array() *= (z1.array() > 0.0).cast<double>(); // ReLU mask
    out.w1 = pf.ax.transpose() * grad_z1;
    if (!out.w1.allFinite() || !out.w2.allFinite()) throw NumericError("non-finite gradients");
    return out;
}

struct AdamState {
    Eigen::MatrixXd m1_w1, m2_w1, m1_w2, m2_w2;
    long t = 0;
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    AdamState(const ModelParams& p, double learning_rate)
        : m1_w1(Eigen::MatrixXd::Zero(p.w1.rows(), p.w1.cols())),
          m2_w1(Eigen::MatrixXd::Zero(p.w1.rows(), p.w1.cols())),
          m1_w2(Eigen::MatrixXd::Zero(p.w2.rows(), p.w2.cols())),
          m2_w2(Eigen::MatrixXd::Zero(p.w2.rows(), p.w2.cols())),
          lr(learning_rate) {}
};

inline void adam_step(ModelParams& params, const Gradients& grads, AdamState& state) {
    if (grads.w1.rows() != params.w1.rows() || grads.w2.rows() != params.w2.rows())
        throw ArgumentError("gradient shape mismatch");
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    auto update = [&](Eigen::MatrixXd& w, const Eigen::MatrixXd& g, Eigen::MatrixXd& m1,
                      Eigen::MatrixXd& m2) {
        m1 = state.beta1 * m1 + (1.0 - state.beta1) * g;
        m2 = state.beta2 * m2 + (1.0 - state.beta2) * g.cwiseProduct(g);
        const Eigen::ArrayXXd mhat = m1.array() / bc1;
        const Eigen::ArrayXXd vhat = m2.array() / bc2;
        w.array() -= state.lr * mhat / (vhat.sqrt() + state.eps);
    };
    update(params.w1, grads.w1, state.m1_w1, state.m2_w1);
    update(params.w2, grads.w2, state.m1_w2, state.m2_w2);
}

} // namespace pull
