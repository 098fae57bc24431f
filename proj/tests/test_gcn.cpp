#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pull/gcn.hpp"
#include "pull/losses.hpp"
#include "test_util.hpp"

using namespace pull;

namespace {

double batch_loss(const ModelParams& params, const PropagatedFeatures& pf,
                  const std::vector<PairTerm>& terms) {
    const Eigen::MatrixXd h = forward(params, pf);
    double loss = 0.0;
    for (const PairTerm& t : terms) loss += t.weight * bce_term(score(h, t.e.u, t.e.v), t.label);
    return loss;
}

// Central finite differences of batch_loss w.r.t. every parameter entry.
Gradients fd_gradients(ModelParams params, const PropagatedFeatures& pf,
                       const std::vector<PairTerm>& terms, double step) {
    Gradients g{Eigen::MatrixXd::Zero(params.w1.rows(), params.w1.cols()),
                Eigen::MatrixXd::Zero(params.w2.rows(), params.w2.cols())};
    auto diff = [&](Eigen::MatrixXd& w, Eigen::MatrixXd& out) {
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            const double orig = w(i);
            w(i) = orig + step;
            const double up = batch_loss(params, pf, terms);
            w(i) = orig - step;
            const double down = batch_loss(params, pf, terms);
            w(i) = orig;
            out(i) = (up - down) / (2.0 * step);
        }
    };
    diff(params.w1, g.w1);
    diff(params.w2, g.w2);
    return g;
}

void check_close(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& fd) {
    for (Eigen::Index i = 0; i < analytic.size(); ++i) {
        const double a = analytic(i), b = fd(i);
        if (std::abs(a) < 1e-8 && std::abs(b) < 1e-8) continue; // compare tiny entries absolutely
        CHECK(std::abs(a - b) / std::max(std::abs(a), std::abs(b)) < 1e-4);
    }
}

} // namespace

TEST_CASE("forward closed-form cases") {
    const PropagationOperator identity = normalized_adjacency(WeightedGraph(3, {}));

    // Zero first layer silences everything.
    ModelParams zero;
    zero.w1 = Eigen::MatrixXd::Zero(3, 2);
    zero.w2 = Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 3).cwiseAbs();
    CHECK(forward(zero, x, identity).cwiseAbs().maxCoeff() == 0.0);

    // Identity composition reproduces non-negative input.
    ModelParams id;
    id.w1 = Eigen::MatrixXd::Identity(3, 3);
    id.w2 = Eigen::MatrixXd::Identity(3, 3);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
    CHECK((forward(id, eye, identity) - eye).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward two-node worked example") {
    const WeightedGraph one(2, {{0, 1, 1.0}});
    const PropagationOperator op = normalized_adjacency(one); // [[.5,.5],[.5,.5]]
    ModelParams id;
    id.w1 = Eigen::MatrixXd::Identity(2, 2);
    id.w2 = Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd h = forward(id, Eigen::MatrixXd::Identity(2, 2), op);
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(h(i) == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("forward rejects shape mismatches") {
    ModelParams p;
    p.w1 = Eigen::MatrixXd::Zero(4, 2);
    p.w2 = Eigen::MatrixXd::Zero(2, 2);
    const PropagationOperator op = normalized_adjacency(WeightedGraph(3, {}));
    CHECK_THROWS_AS(forward(p, Eigen::MatrixXd::Zero(3, 3), op), ArgumentError);
}

TEST_CASE("score closed forms and exact symmetry") {
    Eigen::MatrixXd h(4, 2);
    h << 1, 0, 1, 0, 2, 0, -2, 0;
    CHECK(score(h, 0, 1) == Catch::Approx(0.7310585786300049).epsilon(1e-12));  // sigmoid(1)
    CHECK(score(h, 2, 3) == Catch::Approx(0.01798620996209156).epsilon(1e-12)); // sigmoid(-4)

    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 4);
    CHECK(score(zero, 0, 1) == 0.5);

    Rng rng(3);
    Eigen::MatrixXd rh(6, 5);
    for (Eigen::Index i = 0; i < rh.size(); ++i) rh(i) = rng.normal();
    for (NodeId i = 0; i < 6; ++i)
        for (NodeId j = 0; j < 6; ++j) CHECK(score(rh, i, j) == score(rh, j, i));
}

TEST_CASE("backward zero cases") {
    Rng rng(13);
    const Graph g = testing::random_graph(rng, 5, 0.5);
    const PropagationOperator op = normalized_adjacency(WeightedGraph::unit(g));
    Eigen::MatrixXd x(5, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
    const PropagatedFeatures pf = precompute_features(op, x);
    const ModelParams params = init_params(1, 3, 4);

    // Zero-weight batch -> zero gradients.
    const Gradients gz = backward(params, pf, {{Edge{0, 1}, 1.0, 0.0}});
    CHECK(gz.w1.cwiseAbs().maxCoeff() == 0.0);
    CHECK(gz.w2.cwiseAbs().maxCoeff() == 0.0);

    // Label equal to the current prediction -> zero gradient.
    const Eigen::MatrixXd h = forward(params, pf);
    const double yhat = score(h, 0, 1);
    const Gradients ge = backward(params, pf, {{Edge{0, 1}, yhat, 1.0}});
    CHECK(ge.w1.cwiseAbs().maxCoeff() == 0.0);
    CHECK(ge.w2.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("analytic gradients match central finite differences") {
    int done = 0;
    std::uint64_t attempt = 0;
    while (done < 20) {
        Rng rng(derive_seed(100, "gradcheck", attempt++));
        const std::size_t n = 4 + rng.uniform_index(5); // 4..8 nodes
        const Graph g = testing::random_graph(rng, n, 0.5);
        if (g.num_edges() < 2) continue;
        const PropagationOperator op = normalized_adjacency(WeightedGraph::unit(g));
        Eigen::MatrixXd x(n, 3);
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
        const PropagatedFeatures pf = precompute_features(op, x);
        const ModelParams params = init_params(rng.next_u64(), 3, 4);

        // Keep the instance away from the ReLU kink so the quadratic FD
        // error bound applies.
        const Eigen::MatrixXd z1 = pf.ax * params.w1;
        if (z1.cwiseAbs().minCoeff() < 1e-3) continue;

        std::vector<PairTerm> terms;
        for (const Edge& e : g.edges()) terms.push_back({e, 1.0, 1.0});
        for (NodeId u = 0; u + 1 < n; ++u)
            for (NodeId v = u + 1; v < n; ++v)
                if (!g.has_edge(u, v) && rng.uniform_real() < 0.5)
                    terms.push_back({Edge{u, v}, rng.uniform_real(), 0.25 + rng.uniform_real()});

        const Gradients analytic = backward(params, pf, terms);
        const Gradients fd = fd_gradients(params, pf, terms, 1e-5);
        check_close(analytic.w1, fd.w1);
        check_close(analytic.w2, fd.w2);
        ++done;
    }
}

TEST_CASE("adam step basics") {
    ModelParams p = init_params(5, 2, 2);
    const ModelParams before = p;
    AdamState state(p, 0.01);

    Gradients zero{Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2)};
    adam_step(p, zero, state);
    CHECK(state.t == 1);
    CHECK((p.w1 - before.w1).cwiseAbs().maxCoeff() == 0.0);
    CHECK((p.w2 - before.w2).cwiseAbs().maxCoeff() == 0.0);

    // First step with a single nonzero gradient moves by ~lr against it.
    ModelParams q = init_params(6, 2, 2);
    const double w00 = q.w1(0, 0);
    AdamState s2(q, 0.01);
    Gradients g{Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2)};
    g.w1(0, 0) = 0.37;
    adam_step(q, g, s2);
    CHECK(q.w1(0, 0) - w00 == Catch::Approx(-0.01).epsilon(1e-6));
}

TEST_CASE("adam replay is bit-identical") {
    auto run = [] {
        ModelParams p = init_params(7, 3, 2);
        AdamState state(p, 0.01);
        Rng rng(9);
        for (int step = 0; step < 5; ++step) {
            Gradients g{Eigen::MatrixXd(3, 2), Eigen::MatrixXd(2, 2)};
            for (Eigen::Index i = 0; i < g.w1.size(); ++i) g.w1(i) = rng.normal();
            for (Eigen::Index i = 0; i < g.w2.size(); ++i) g.w2(i) = rng.normal();
            adam_step(p, g, state);
        }
        return p;
    };
    const ModelParams a = run(), b = run();
    CHECK(a.w1 == b.w1);
    CHECK(a.w2 == b.w2);
}

TEST_CASE("glorot init is seeded and bounded") {
    const ModelParams a = init_params(11, 6, 4);
    const ModelParams b = init_params(11, 6, 4);
    const ModelParams c = init_params(12, 6, 4);
    CHECK(a.w1 == b.w1);
    CHECK(a.w2 == b.w2);
    CHECK(a.w1 != c.w1);

    CHECK(a.w1.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / (6 + 4)));
    CHECK(a.w2.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / (4 + 4)));

    const ModelParams tiny = init_params(1, 1, 1);
    CHECK(std::abs(tiny.w1(0, 0)) <= std::sqrt(3.0));
    CHECK_THROWS_AS(init_params(1, 0, 1), ArgumentError);
}

TEST_CASE("forward is reproducible bit-for-bit") {
    Rng rng(21);
    const Graph g = testing::random_graph(rng, 10, 0.3);
    const PropagationOperator op = normalized_adjacency(WeightedGraph::unit(g));
    Eigen::MatrixXd x(10, 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
    const ModelParams params = init_params(2, 4, 4);
    const Eigen::MatrixXd h1 = forward(params, x, op);
    const Eigen::MatrixXd h2 = forward(params, x, op);
    CHECK(h1 == h2);
}
