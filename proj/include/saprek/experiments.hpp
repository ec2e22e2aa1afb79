#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "saprek/dense.hpp"
#include "saprek/sampling.hpp"
#include "saprek/solvers.hpp"

namespace saprek {

enum class MatrixKind { Gaussian, Coherent };

const char* kind_name(MatrixKind kind);

struct ExperimentConfig {
    MatrixKind kind = MatrixKind::Gaussian;
    int rows = 200;
    int cols = 10;
    int trials = 50;
    long iterations = 10000;
    std::vector<double> eps_list;
    std::uint64_t base_seed = 1;
    long record_every = 10;
    std::string output_path;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

/// i.i.d. standard normal entries, deterministic per stream seed.
Mat gen_gaussian(int m, int n, SeededStream& stream);

/// i.i.d. uniform [0,1) entries ("coherent" ensemble).
Mat gen_coherent(int m, int n, SeededStream& stream);

Mat gen_matrix(MatrixKind kind, int m, int n, SeededStream& stream);

/// Mean plus the 5th-smallest/5th-largest band of the per-trial values
/// (clamped to the extremes when fewer than 9 trials are available).
struct BandStat {
    double mean;
    double low;
    double high;
};

BandStat band_stat(const std::vector<double>& values);

/// Run config.trials seeded trials of one method on a fixed matrix.
/// Trial t draws its rhs b ~ U[0,1)^m and its sampling sequence from a
/// stream seeded with base_seed + 1 + t; trials execute in parallel and
/// are aggregated in trial order, so results do not depend on scheduling.
std::vector<TrialRecord> run_trials(const Mat& a, const MethodConfig& method,
                                    const ExperimentConfig& config);

/// Error-vs-iteration curves; one CSV per method (REK plus each eps).
/// Returns the paths written.
std::vector<std::string> run_error_vs_iteration(const ExperimentConfig& config);

/// Error-vs-eps at the quarter points of the iteration budget; one CSV.
std::string run_error_vs_epsilon(const ExperimentConfig& config);

/// lambda_min^+(W'_eps) over the eps grid for the seeded matrix; one CSV.
/// include_exact adds the eigensolver value for the exact-Z expectation.
std::string run_lambda_curve(const ExperimentConfig& config, bool include_exact);

/// Best-eps table over the standard dimension/ensemble grid
/// (200x10, 200x20, 400x10) x (gaussian, coherent); one CSV.
std::string run_table_eps_sweep(const ExperimentConfig& config);

/// Cross-validation suite: closed forms vs brute-force expectations,
/// update-rule equivalences, limits and specializations. Prints one line
/// per check; returns the number of failures.
int run_cross_validation(std::ostream& out, std::uint64_t seed);

/// Order-of-magnitude grid 1e-5 .. 1e4.
std::vector<double> default_eps_grid();

} // namespace saprek
