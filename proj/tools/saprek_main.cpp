#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "saprek/experiments.hpp"

namespace {

saprek::MatrixKind parse_kind(const std::string& name) {
    if (name == "gaussian") return saprek::MatrixKind::Gaussian;
    if (name == "coherent") return saprek::MatrixKind::Coherent;
    throw CLI::ValidationError("--kind must be 'gaussian' or 'coherent'");
}

struct CommonOpts {
    std::string kind = "gaussian";
    int rows = 200;
    int cols = 10;
    int trials = 50;
    long iters = 10000;
    std::vector<double> eps;
    std::uint64_t seed = 1;
    long stride = 10;
    std::string out;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_trials = true) {
    cmd->add_option("--kind", o.kind, "matrix ensemble: gaussian or coherent");
    cmd->add_option("--rows", o.rows, "matrix rows");
    cmd->add_option("--cols", o.cols, "matrix columns");
    if (with_trials) {
        cmd->add_option("--trials", o.trials, "number of seeded trials");
        cmd->add_option("--iters", o.iters, "iterations per trial");
        cmd->add_option("--stride", o.stride, "record every N iterations");
        cmd->add_option("--threads", o.threads, "trial workers (0 = all cores)");
    }
    cmd->add_option("--eps", o.eps, "eps value (repeatable)");
    cmd->add_option("--seed", o.seed, "base seed");
    cmd->add_option("--out", o.out, "output path");
}

saprek::ExperimentConfig to_config(const CommonOpts& o) {
    saprek::ExperimentConfig config;
    config.kind = parse_kind(o.kind);
    config.rows = o.rows;
    config.cols = o.cols;
    config.trials = o.trials;
    config.iterations = o.iters;
    config.eps_list = o.eps;
    config.base_seed = o.seed;
    config.record_every = o.stride;
    config.output_path = o.out;
    config.threads = o.threads;
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized Kaczmarz / extended Kaczmarz / sketch-and-project "
                 "solver experiments"};
    app.require_subcommand(1);

    CommonOpts converge_opts, sweep_opts, lambda_opts, table_opts;
    bool lambda_exact = false;
    std::uint64_t oracle_seed = 1;

    CLI::App* converge =
        app.add_subcommand("converge", "error-vs-iteration curves (REK plus each eps)");
    converge_opts.out = "converge";
    converge_opts.eps = {0.01, 0.1, 1.0, 10.0, 100.0};
    add_common(converge, converge_opts);

    CLI::App* sweep = app.add_subcommand("sweep", "error-vs-eps at quarter iteration marks");
    sweep_opts.out = "sweep.csv";
    add_common(sweep, sweep_opts);

    CLI::App* lambda = app.add_subcommand("lambda", "rate eigenvalue as a function of eps");
    lambda_opts.out = "lambda.csv";
    add_common(lambda, lambda_opts, /*with_trials=*/false);
    lambda->add_flag("--exact-z", lambda_exact,
                     "also report the eigensolver value for the exact-Z expectation");

    CLI::App* table =
        app.add_subcommand("table", "best-eps table over the standard dimension grid");
    table_opts.out = "table.csv";
    add_common(table, table_opts);

    CLI::App* oracle = app.add_subcommand("oracle", "run the cross-validation suite");
    oracle->add_option("--seed", oracle_seed, "base seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (converge->parsed()) {
            for (const std::string& path : saprek::run_error_vs_iteration(to_config(converge_opts))) {
                std::cout << "wrote " << path << "\n";
            }
        } else if (sweep->parsed()) {
            auto config = to_config(sweep_opts);
            if (config.eps_list.empty()) config.eps_list = saprek::default_eps_grid();
            std::cout << "wrote " << saprek::run_error_vs_epsilon(config) << "\n";
        } else if (lambda->parsed()) {
            auto config = to_config(lambda_opts);
            if (config.eps_list.empty()) config.eps_list = saprek::default_eps_grid();
            std::cout << "wrote " << saprek::run_lambda_curve(config, lambda_exact) << "\n";
        } else if (table->parsed()) {
            auto config = to_config(table_opts);
            std::cout << "wrote " << saprek::run_table_eps_sweep(config) << "\n";
        } else if (oracle->parsed()) {
            return saprek::run_cross_validation(std::cout, oracle_seed) == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
