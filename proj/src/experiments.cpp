#include "saprek/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <thread>

#include "saprek/linalg.hpp"
#include "saprek/rates.hpp"
#include "saprek/sap.hpp"

namespace saprek {

const char* kind_name(MatrixKind kind) {
    return kind == MatrixKind::Gaussian ? "gaussian" : "coherent";
}

void ExperimentConfig::validate() const {
    if (rows < 1 || cols < 1) throw Error("config: dimensions must be positive");
    if (trials < 1) throw Error("config: trials must be >= 1");
    if (iterations < 0) throw Error("config: iterations must be >= 0");
    if (record_every < 1) throw Error("config: stride must be >= 1");
    for (double e : eps_list) {
        if (!(e > 0.0)) throw NonPositiveEpsilon("config: eps entries must be positive");
    }
}

Mat gen_gaussian(int m, int n, SeededStream& stream) {
    Mat a(m, n);
    for (std::size_t k = 0; k < a.size(); ++k) a.data()[k] = stream.next_gaussian();
    return a;
}

Mat gen_coherent(int m, int n, SeededStream& stream) {
    Mat a(m, n);
    for (std::size_t k = 0; k < a.size(); ++k) a.data()[k] = stream.next_uniform();
    return a;
}

Mat gen_matrix(MatrixKind kind, int m, int n, SeededStream& stream) {
    return kind == MatrixKind::Gaussian ? gen_gaussian(m, n, stream)
                                        : gen_coherent(m, n, stream);
}

BandStat band_stat(const std::vector<double>& values) {
    if (values.empty()) throw Error("band_stat: no values");
    double sum = 0.0;
    for (double v : values) sum += v;
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const int t = static_cast<int>(sorted.size());
    const int lo = std::min(4, t - 1);
    const int hi = std::max(t - 5, 0);
    return {sum / t, sorted[lo], sorted[hi]};
}

std::vector<TrialRecord> run_trials(const Mat& a, const MethodConfig& method,
                                    const ExperimentConfig& config) {
    config.validate();
    std::vector<TrialRecord> records(config.trials);

    auto run_one = [&](int t) {
        SeededStream stream(config.base_seed + 1 + static_cast<std::uint64_t>(t));
        Vec b(a.rows());
        for (double& v : b) v = stream.next_uniform();
        LinearSystem system(a, std::move(b));
        records[t] = run_solver(system, method, config.iterations, stream, config.record_every);
    };

    int workers = config.threads > 0 ? config.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, config.trials));
    if (workers == 1) {
        for (int t = 0; t < config.trials; ++t) run_one(t);
        return records;
    }

    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int t = next.fetch_add(1); t < config.trials; t = next.fetch_add(1)) {
                run_one(t);
            }
        });
    }
    for (auto& th : pool) th.join();
    return records;
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot open output file: " + path);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    void close() {
        out_.flush();
        if (!out_) throw IoError("write failed: " + path_);
        out_.close();
    }

private:
    std::string path_;
    std::ofstream out_;
};

std::string eps_tag(double eps) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", eps);
    return buf;
}

// Per-iteration aggregates for one method over all trials. All records
// share the same sample grid (same iteration budget and stride).
void write_convergence_csv(const std::string& path, const std::vector<TrialRecord>& records) {
    CsvWriter csv(path);
    csv.row({"k", "mean_err_x", "band_low_x", "band_high_x", "mean_err_z", "band_low_z",
             "band_high_z", "mean_err_combined", "band_low_c", "band_high_c"});
    const std::size_t points = records.front().samples.size();
    std::vector<double> xs(records.size()), zs(records.size()), cs(records.size());
    for (std::size_t p = 0; p < points; ++p) {
        for (std::size_t t = 0; t < records.size(); ++t) {
            xs[t] = records[t].samples[p].err_x;
            zs[t] = records[t].samples[p].err_z;
            cs[t] = records[t].samples[p].err_combined;
        }
        const BandStat bx = band_stat(xs), bz = band_stat(zs), bc = band_stat(cs);
        csv.row({std::to_string(records.front().samples[p].k), fmt_double(bx.mean),
                 fmt_double(bx.low), fmt_double(bx.high), fmt_double(bz.mean),
                 fmt_double(bz.low), fmt_double(bz.high), fmt_double(bc.mean),
                 fmt_double(bc.low), fmt_double(bc.high)});
    }
    csv.close();
}

} // namespace

std::vector<std::string> run_error_vs_iteration(const ExperimentConfig& config) {
    config.validate();
    SeededStream matrix_stream(config.base_seed);
    const Mat a = gen_matrix(config.kind, config.rows, config.cols, matrix_stream);

    std::vector<std::string> written;

    MethodConfig rek;
    rek.method = Method::REK;
    const std::string rek_path = config.output_path + "_rek.csv";
    write_convergence_csv(rek_path, run_trials(a, rek, config));
    written.push_back(rek_path);

    for (double eps : config.eps_list) {
        MethodConfig sap;
        sap.method = Method::SAPREK;
        sap.eps = eps;
        const std::string path = config.output_path + "_saprek_eps" + eps_tag(eps) + ".csv";
        write_convergence_csv(path, run_trials(a, sap, config));
        written.push_back(path);
    }
    return written;
}

std::string run_error_vs_epsilon(const ExperimentConfig& config) {
    config.validate();
    if (config.eps_list.empty()) throw Error("sweep: eps grid must be nonempty");
    SeededStream matrix_stream(config.base_seed);
    const Mat a = gen_matrix(config.kind, config.rows, config.cols, matrix_stream);

    // Measure at the quarter points of the iteration budget; the last
    // mark is the final iterate itself.
    const long q = std::max(1L, config.iterations / 4);
    std::vector<long> ks;
    for (long mult = 1; mult <= 3; ++mult) {
        const long k = std::min(mult * q, config.iterations);
        if (ks.empty() || ks.back() != k) ks.push_back(k);
    }
    if (ks.empty() || ks.back() != config.iterations) ks.push_back(config.iterations);

    ExperimentConfig inner = config;
    inner.record_every = q;

    CsvWriter csv(config.output_path);
    csv.row({"eps", "k", "mean_err_x", "band_low_x", "band_high_x"});
    std::vector<double> xs(config.trials);
    for (double eps : config.eps_list) {
        MethodConfig sap;
        sap.method = Method::SAPREK;
        sap.eps = eps;
        const std::vector<TrialRecord> records = run_trials(a, sap, inner);
        for (long k : ks) {
            for (int t = 0; t < config.trials; ++t) {
                const auto& samples = records[t].samples;
                auto it = std::find_if(samples.begin(), samples.end(),
                                       [k](const TrialSample& s) { return s.k == k; });
                xs[t] = it->err_x;
            }
            const BandStat b = band_stat(xs);
            csv.row({fmt_double(eps), std::to_string(k), fmt_double(b.mean), fmt_double(b.low),
                     fmt_double(b.high)});
        }
    }
    csv.close();
    return config.output_path;
}

std::string run_lambda_curve(const ExperimentConfig& config, bool include_exact) {
    config.validate();
    if (config.eps_list.empty()) throw Error("lambda: eps grid must be nonempty");
    SeededStream matrix_stream(config.base_seed);
    const Mat a = gen_matrix(config.kind, config.rows, config.cols, matrix_stream);

    CsvWriter csv(config.output_path);
    if (include_exact) {
        csv.row({"eps", "lambda_min_plus", "lambda_min_plus_exact"});
    } else {
        csv.row({"eps", "lambda_min_plus"});
    }
    // eps on the CSV axis is the solver's eps for the matrix as generated;
    // the normalized-theory eigenvalue is evaluated at eps / |A|_F^2.
    const double fro2 = std::pow(frobenius_norm(a), 2);
    const Mat normalized = [&] {
        Mat c = a;
        const double f = frobenius_norm(a);
        for (std::size_t k = 0; k < c.size(); ++k) c.data()[k] /= f;
        return c;
    }();
    for (double eps : config.eps_list) {
        const double lam = lambda_min_plus_at_system_eps(a, eps);
        if (include_exact) {
            const ExpectedUpdateMatrix exact =
                expected_update_matrix(normalized, eps / fro2, ExpectationMode::ExactZ);
            csv.row({fmt_double(eps), fmt_double(lam),
                     fmt_double(lambda_min_positive(exact.w))});
        } else {
            csv.row({fmt_double(eps), fmt_double(lam)});
        }
    }
    csv.close();
    return config.output_path;
}

std::string run_table_eps_sweep(const ExperimentConfig& config) {
    config.validate();
    const std::vector<double>& grid =
        config.eps_list.empty() ? default_eps_grid() : config.eps_list;

    struct Dims {
        int m, n;
    };
    const Dims dims[] = {{200, 10}, {200, 20}, {400, 10}};
    const MatrixKind kinds[] = {MatrixKind::Gaussian, MatrixKind::Coherent};

    CsvWriter csv(config.output_path);
    csv.row({"kind", "m", "n", "best_eps", "final_mean_err"});
    for (MatrixKind kind : kinds) {
        for (const Dims& d : dims) {
            SeededStream matrix_stream(config.base_seed);
            const Mat a = gen_matrix(kind, d.m, d.n, matrix_stream);

            double best_eps = grid.front();
            double best_err = 0.0;
            bool first = true;
            for (double eps : grid) {
                MethodConfig sap;
                sap.method = Method::SAPREK;
                sap.eps = eps;
                ExperimentConfig inner = config;
                inner.kind = kind;
                inner.rows = d.m;
                inner.cols = d.n;
                inner.record_every = std::max(1L, config.iterations);
                const std::vector<TrialRecord> records = run_trials(a, sap, inner);
                double mean = 0.0;
                for (const TrialRecord& r : records) mean += r.samples.back().err_x;
                mean /= config.trials;
                if (first || mean < best_err) {
                    best_err = mean;
                    best_eps = eps;
                    first = false;
                }
            }
            csv.row({kind_name(kind), std::to_string(d.m), std::to_string(d.n),
                     fmt_double(best_eps), fmt_double(best_err)});
        }
    }
    csv.close();
    return config.output_path;
}

std::vector<double> default_eps_grid() {
    std::vector<double> grid;
    for (int p = -5; p <= 4; ++p) grid.push_back(std::pow(10.0, p));
    return grid;
}

// ---------------------------------------------------------------------------
// Cross-validation suite
// ---------------------------------------------------------------------------

namespace {

Mat random_normalized(SeededStream& stream, int m, int n) {
    Mat a = gen_gaussian(m, n, stream);
    const double f = frobenius_norm(a);
    for (std::size_t k = 0; k < a.size(); ++k) a.data()[k] /= f;
    return a;
}

struct CheckPrinter {
    std::ostream& out;
    int failures = 0;

    void report(const char* name, bool ok, double measure) {
        out << (ok ? "[ ok ] " : "[FAIL] ") << name << " (worst " << measure << ")\n";
        if (!ok) ++failures;
    }
};

} // namespace

int run_cross_validation(std::ostream& out, std::uint64_t seed) {
    SeededStream stream(seed);
    CheckPrinter check{out};
    const double eps_grid[] = {0.01, 1.0, 100.0};

    // Closed-form W'_eps against the brute-force expectation and the
    // SVD-route assembly.
    {
        double worst_brute = 0.0, worst_svd = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            const int m = 3 + static_cast<int>(stream.next_u64() % 10);
            const int n = 1 + static_cast<int>(stream.next_u64() % 6);
            const Mat a = random_normalized(stream, m, n);
            for (double eps : eps_grid) {
                const Mat cf = w_eps_closed_form(a, eps);
                const ExpectedUpdateMatrix brute =
                    expected_update_matrix(a, eps, ExpectationMode::DroppedTerm);
                const Mat via_svd = w_eps_from_svd(a, eps);
                for (int r = 0; r < cf.rows(); ++r) {
                    for (int c = 0; c < cf.cols(); ++c) {
                        worst_brute = std::max(worst_brute, std::abs(cf(r, c) - brute.w(r, c)));
                        worst_svd = std::max(worst_svd, std::abs(cf(r, c) - via_svd(r, c)));
                    }
                }
            }
        }
        check.report("closed form vs brute-force expectation", worst_brute <= 1e-10, worst_brute);
        check.report("closed form vs SVD-route assembly", worst_svd <= 1e-10, worst_svd);
    }

    // lambda_min^+ from the block formulas against the dense eigensolver.
    {
        double worst = 0.0;
        for (int rep = 0; rep < 10; ++rep) {
            const Mat a = random_normalized(stream, 12, 5);
            for (double eps : eps_grid) {
                const double structural = lambda_min_plus_w_eps(a, eps);
                const double dense = lambda_min_positive(w_eps_closed_form(a, eps));
                worst = std::max(worst, std::abs(structural - dense));
            }
        }
        check.report("lambda_min_plus vs dense eigensolver", worst <= 1e-9, worst);
    }

    // Update-rule equivalences on random systems and states.
    {
        double worst_sap = 0.0, worst_rek = 0.0;
        for (int rep = 0; rep < 10; ++rep) {
            const Mat a = gen_gaussian(6, 3, stream);
            Vec b(6), z(6), x(3);
            for (double& v : b) v = stream.next_uniform();
            for (double& v : z) v = stream.next_gaussian();
            for (double& v : x) v = stream.next_gaussian();
            const EmbeddedSystem sys = build_embedded_system(a, b);
            for (int i = 0; i < 6; ++i) {
                for (int j = 0; j < 3; ++j) {
                    for (double eps : eps_grid) {
                        const SolverState fast =
                            saprek_step(a, b, SolverState{z, x, 0}, i, j, eps);
                        Vec y(9);
                        std::copy(z.begin(), z.end(), y.begin());
                        std::copy(x.begin(), x.end(), y.begin() + 6);
                        const Vec ref = sap_step(sys, ProjectionMetric{eps, 6, 3},
                                                 SketchMatrix{j, i, 6, 3}, y);
                        double diff = 0.0, scale = 1.0;
                        for (int r = 0; r < 6; ++r) diff = std::max(diff, std::abs(fast.z[r] - ref[r]));
                        for (int r = 0; r < 3; ++r) diff = std::max(diff, std::abs(fast.x[r] - ref[6 + r]));
                        for (int r = 0; r < 9; ++r) scale = std::max(scale, std::abs(ref[r]));
                        worst_sap = std::max(worst_sap, diff / scale);
                    }
                    const SolverState paired = rek_step(a, b, SolverState{z, x, 0}, i, j);
                    const auto [zm, xm] = rek_matrix_step(a, b, z, x, i, j);
                    double diff = 0.0;
                    for (int r = 0; r < 6; ++r) diff = std::max(diff, std::abs(paired.z[r] - zm[r]));
                    for (int r = 0; r < 3; ++r) diff = std::max(diff, std::abs(paired.x[r] - xm[r]));
                    worst_rek = std::max(worst_rek, diff);
                }
            }
        }
        check.report("saprek_step vs generic sketch-and-project", worst_sap <= 1e-10, worst_sap);
        check.report("rek_step vs matrix-form update", worst_rek <= 1e-12, worst_rek);
    }

    // eps -> 0 recovers the paired update.
    {
        double prev = -1.0;
        bool monotone = true;
        double at_smallest = 0.0;
        const Mat a = gen_gaussian(8, 4, stream);
        Vec b(8), z(8), x(4);
        for (double& v : b) v = stream.next_uniform();
        for (double& v : z) v = stream.next_gaussian();
        for (double& v : x) v = stream.next_gaussian();
        for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
            double dev = 0.0;
            for (int i = 0; i < 8; ++i) {
                for (int j = 0; j < 4; ++j) {
                    const SolverState rek = rek_step(a, b, SolverState{z, x, 0}, i, j);
                    const SolverState sap = saprek_step(a, b, SolverState{z, x, 0}, i, j, eps);
                    double diff2 = sqdist(rek.z, sap.z) + sqdist(rek.x, sap.x);
                    double ref = std::sqrt(norm_sq(rek.z) + norm_sq(rek.x));
                    dev = std::max(dev, std::sqrt(diff2) / (1.0 + ref));
                }
            }
            if (prev >= 0.0 && dev > prev) monotone = false;
            prev = dev;
            at_smallest = dev;
        }
        check.report("eps->0 limit recovers the paired update",
                     monotone && at_smallest <= 1e-5, at_smallest);
    }

    // Single-row sketches with B = I reduce to the row projection, and the
    // expected update matrix reproduces its rate.
    {
        double worst_step = 0.0, worst_rate = 0.0;
        for (int rep = 0; rep < 10; ++rep) {
            const Mat a = gen_gaussian(6, 3, stream);
            Vec b(6), x(3);
            for (double& v : b) v = stream.next_uniform();
            for (double& v : x) v = stream.next_gaussian();
            const Mat eye = Mat::identity(3);
            Mat ez(3, 3);
            const DiscreteDistribution rows = row_probs_rk(a);
            for (int i = 0; i < 6; ++i) {
                Mat s(6, 1);
                s(i, 0) = 1.0;
                const Vec via_sap = sap_step(a, b, eye, s, x);
                const Vec via_rk = rk_step(a, b, x, i);
                for (int r = 0; r < 3; ++r) {
                    worst_step = std::max(worst_step, std::abs(via_sap[r] - via_rk[r]));
                }
                const Mat z = update_matrix_Z(a, eye, s);
                for (int r = 0; r < 3; ++r) {
                    for (int c = 0; c < 3; ++c) ez(r, c) += rows.prob(i) * z(r, c);
                }
            }
            worst_rate = std::max(worst_rate,
                                  std::abs(sap_rate_from_ez(ez, eye) - rk_rate(a)));
        }
        check.report("single-row sketch recovers row projection", worst_step <= 1e-12, worst_step);
        check.report("expected update matrix recovers row-projection rate",
                     worst_rate <= 1e-10, worst_rate);
    }

    // Off-diagonal block equivalence of B^{-1} Z for block-diagonal B.
    {
        bool all_hold = true;
        for (int rep = 0; rep < 200; ++rep) {
            const Mat a = gen_gaussian(5, 3, stream);
            Vec b(5);
            for (double& v : b) v = stream.next_uniform();
            const EmbeddedSystem sys = build_embedded_system(a, b);
            const int i = static_cast<int>(stream.next_u64() % 5);
            const int j = static_cast<int>(stream.next_u64() % 3);
            const double eps = eps_grid[rep % 3];
            const ProjectionMetric metric{eps, 5, 3};
            const Mat z = update_matrix_Z(sys, metric, SketchMatrix{j, i, 5, 3});
            const BlockStructureReport rep2 =
                block_structure_report({z}, metric.dense(), 5);
            all_hold = all_hold && rep2.all_equivalent;
        }
        check.report("block-structure zero equivalence", all_hold, all_hold ? 0.0 : 1.0);
    }

    out << (check.failures == 0 ? "all checks passed\n" : "some checks FAILED\n");
    return check.failures;
}

} // namespace saprek
