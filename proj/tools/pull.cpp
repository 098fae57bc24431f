// Command-line front end: edge splitting, training, oracle checks, the
// scaling benchmark, and synthetic SBM generation.
//
// Exit codes: 0 success, 2 usage/config error, 3 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "pull/experiment.hpp"
#include "pull/io.hpp"
#include "pull/sbm.hpp"
#include "pull/serialize.hpp"
#include "pull/splitter.hpp"

namespace {

struct SplitArgs {
    std::string edges, out;
    double r_m = 0.1, r_valid = 0.1;
    std::uint64_t seed = 0;
    std::size_t num_nodes = 0;
};

void cmd_split(const SplitArgs& a) {
    const pull::EdgeListFile ef = pull::load_edge_list(a.edges);
    const std::size_t n = std::max(ef.min_num_nodes, a.num_nodes);
    const pull::Graph g(n, ef.edges);
    const pull::Split s = pull::make_split(g, a.r_m, a.r_valid, a.seed);
    pull::save_split(a.out, s);
    if (s.test_missing.empty())
        std::cerr << "warning: r_m=" << a.r_m << " yields an empty test set\n";
    std::cout << "train=" << s.train_edges.size() << " valid=" << s.valid_missing.size()
              << " test=" << s.test_missing.size() << "\n";
}

void cmd_train(const std::string& config_path) {
    pull::json j;
    try {
        j = pull::json::parse(pull::read_file(config_path));
    } catch (const pull::json::exception& e) {
        throw pull::ArgumentError(std::string("bad config JSON: ") + e.what());
    }
    const pull::RunConfig cfg = pull::run_config_from_json(j);
    const pull::MetricsReport report = pull::run_experiment(cfg);
    std::cout << "test_auroc=" << pull::format_g17(report.test_auroc)
              << " test_auprc=" << pull::format_g17(report.test_auprc) << "\n";
}

int cmd_oracle_check(std::uint64_t seed, int trials, const std::string& out) {
    const pull::OracleReport report = pull::run_oracle_checks(seed, trials);
    for (const pull::OracleCheck& c : report.checks)
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " (" << c.instance
                  << "): residual=" << pull::format_g17(c.residual)
                  << " tol=" << pull::format_g17(c.tolerance) << "\n";
    if (!out.empty())
        pull::atomic_write_file(out, pull::oracle_report_to_json(report).dump(2) + "\n");
    if (!report.all_pass) {
        std::cerr << "oracle check failed\n";
        return 3;
    }
    return 0;
}

struct BenchArgs {
    std::string edges, features, out = "bench.csv";
    std::vector<double> portions = {0.25, 0.5, 0.75, 1.0};
    std::size_t feature_dim = 32;
    std::uint64_t seed = 0;
};

void cmd_bench(const BenchArgs& a) {
    const pull::EdgeListFile ef = pull::load_edge_list(a.edges);
    const pull::Graph g(ef.min_num_nodes, ef.edges);
    Eigen::MatrixXd x;
    if (!a.features.empty()) {
        x = pull::load_features(a.features);
        if (static_cast<std::size_t>(x.rows()) != g.num_nodes())
            throw pull::ArgumentError("feature rows do not match edge file");
    } else {
        pull::Rng rng(pull::derive_seed(a.seed, "bench/features"));
        x.resize(g.num_nodes(), a.feature_dim);
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.normal();
    }
    const pull::BenchResult res = pull::run_bench_scaling(g, x, a.portions, a.seed);
    pull::atomic_write_file(a.out, pull::bench_csv(res));
    std::cout << "R2 " << (res.r_squared_defined ? pull::format_g17(res.r_squared) : "NA") << "\n";
}

struct SbmArgs {
    std::size_t nodes = 300, blocks = 3, feature_dim = 8;
    double p_in = 0.1, p_out = 0.005;
    std::uint64_t seed = 0;
    std::string out_edges, out_features;
};

void cmd_gen_sbm(const SbmArgs& a) {
    const pull::SbmGraph sbm = pull::gen_sbm(a.nodes, a.blocks, a.p_in, a.p_out, a.feature_dim, a.seed);
    pull::save_edge_list(a.out_edges, sbm.graph.edges());
    pull::save_features(a.out_features, sbm.features);
    std::cout << "nodes=" << sbm.graph.num_nodes() << " edges=" << sbm.graph.num_edges() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PULL: PU-learning link prediction on edge-incomplete graphs"};
    app.require_subcommand(1);

    SplitArgs split_args;
    CLI::App* split = app.add_subcommand("split", "Partition an edge list into train/valid/test");
    split->add_option("--edges", split_args.edges, "edge-list file")->required();
    split->add_option("--r-m", split_args.r_m, "test missing-edge ratio");
    split->add_option("--r-valid", split_args.r_valid, "valid missing-edge ratio");
    split->add_option("--seed", split_args.seed, "master seed");
    split->add_option("--num-nodes", split_args.num_nodes, "node count override (default: max id + 1)");
    split->add_option("--out", split_args.out, "output split JSON")->required();
    split->callback([&] { cmd_split(split_args); });

    std::string config_path;
    CLI::App* train = app.add_subcommand("train", "Train a method from a JSON config");
    train->add_option("--config", config_path, "run config JSON")->required();
    train->callback([&] { cmd_train(config_path); });

    std::uint64_t oc_seed = 0;
    int oc_trials = 20;
    std::string oc_out;
    CLI::App* oracle = app.add_subcommand("oracle-check", "Run enumeration-oracle identity checks");
    oracle->add_option("--seed", oc_seed, "master seed");
    oracle->add_option("--trials", oc_trials, "number of random instances")
        ->check(CLI::PositiveNumber);
    oracle->add_option("--out", oc_out, "report JSON path");
    int oracle_rc = 0;
    oracle->callback([&] { oracle_rc = cmd_oracle_check(oc_seed, oc_trials, oc_out); });

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench-scaling", "Runtime-vs-edges scaling benchmark");
    bench->add_option("--edges", bench_args.edges, "edge-list file")->required();
    bench->add_option("--features", bench_args.features, "feature file (default: seeded noise)");
    bench->add_option("--feature-dim", bench_args.feature_dim, "generated feature width");
    bench->add_option("--portions", bench_args.portions, "edge portions in (0,1]")->delimiter(',');
    bench->add_option("--seed", bench_args.seed, "master seed");
    bench->add_option("--out", bench_args.out, "output CSV path");
    bench->callback([&] { cmd_bench(bench_args); });

    SbmArgs sbm_args;
    CLI::App* sbm = app.add_subcommand("gen-sbm", "Generate a stochastic block model graph");
    sbm->add_option("--nodes", sbm_args.nodes, "node count");
    sbm->add_option("--blocks", sbm_args.blocks, "block count");
    sbm->add_option("--p-in", sbm_args.p_in, "within-block edge probability");
    sbm->add_option("--p-out", sbm_args.p_out, "cross-block edge probability");
    sbm->add_option("--feature-dim", sbm_args.feature_dim, "feature width (>= blocks)");
    sbm->add_option("--seed", sbm_args.seed, "master seed");
    sbm->add_option("--out-edges", sbm_args.out_edges, "output edge list")->required();
    sbm->add_option("--out-features", sbm_args.out_features, "output feature file")->required();
    sbm->callback([&] { cmd_gen_sbm(sbm_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    } catch (const pull::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const pull::ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const pull::CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return oracle_rc;
}
