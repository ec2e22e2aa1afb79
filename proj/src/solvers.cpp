#include "saprek/solvers.hpp"

#include <cmath>
#include <utility>

#include "saprek/kernels.hpp"
#include "saprek/linalg.hpp"

namespace saprek {

LinearSystem::LinearSystem(Mat a_, Vec b_) : a(std::move(a_)), b(std::move(b_)) {
    if (static_cast<int>(b.size()) != a.rows()) {
        throw DimensionMismatch("LinearSystem: b size must equal row count");
    }
    require_finite(a, "LinearSystem matrix");
    require_finite(b, "LinearSystem rhs");
}

namespace {

// Update cores shared by the public step functions and the run loop.
// row_i points at the contiguous row A_i: (length n), col_j at the
// contiguous column A_:j (length m).

void rek_core(const double* row_i, std::size_t n, const double* col_j, std::size_t m,
              double ni2, double nj2, double bi, int i, Vec& z, Vec& x) {
    const double zeta = kernels::dot(col_j, z.data(), m) / nj2;
    kernels::axpy(-zeta, col_j, z.data(), m);
    const double gamma = (kernels::dot(row_i, x.data(), n) - bi + z[i]) / ni2;
    kernels::axpy(-gamma, row_i, x.data(), n);
}

void saprek_core(const double* row_i, std::size_t n, const double* col_j, std::size_t m,
                 double ni2, double nj2, double aij, double bi, double eps, int i, Vec& z,
                 Vec& x) {
    const double d = 1.0 + ni2 / eps;
    const double det = nj2 * d - aij * aij;
    const double r1 = kernels::dot(col_j, z.data(), m);
    const double r2 = z[i] + kernels::dot(row_i, x.data(), n) - bi;
    const double alpha = (d * r1 - aij * r2) / det;
    const double beta = (-aij * r1 + nj2 * r2) / det;
    kernels::axpy(-alpha, col_j, z.data(), m);
    z[i] -= beta;
    kernels::axpy(-beta / eps, row_i, x.data(), n);
}

Vec extract_column(const Mat& a, int j) {
    Vec c(a.rows());
    for (int i = 0; i < a.rows(); ++i) c[i] = a(i, j);
    return c;
}

} // namespace

Vec rk_step(const Mat& a, const Vec& b, const Vec& x, int i) {
    if (static_cast<int>(x.size()) != a.cols() || static_cast<int>(b.size()) != a.rows()) {
        throw DimensionMismatch("rk_step: size mismatch");
    }
    const double* row = a.row_ptr(i);
    const std::size_t n = static_cast<std::size_t>(a.cols());
    const double ni2 = kernels::dot(row, row, n);
    if (ni2 == 0.0) throw ZeroRow("rk_step: row has zero norm");
    Vec out = x;
    const double gamma = (kernels::dot(row, out.data(), n) - b[i]) / ni2;
    kernels::axpy(-gamma, row, out.data(), n);
    return out;
}

SolverState rek_step(const Mat& a, const Vec& b, const SolverState& state, int i, int j) {
    const std::size_t m = static_cast<std::size_t>(a.rows());
    const std::size_t n = static_cast<std::size_t>(a.cols());
    if (state.z.size() != m || state.x.size() != n || b.size() != m) {
        throw DimensionMismatch("rek_step: size mismatch");
    }
    const Vec col = extract_column(a, j);
    const double* row = a.row_ptr(i);
    const double ni2 = kernels::dot(row, row, n);
    const double nj2 = kernels::dot(col.data(), col.data(), m);
    if (ni2 == 0.0) throw ZeroRow("rek_step: row has zero norm");
    if (nj2 == 0.0) throw ZeroColumn("rek_step: column has zero norm");
    SolverState out{state.z, state.x, state.k + 1};
    rek_core(row, n, col.data(), m, ni2, nj2, b[i], i, out.z, out.x);
    return out;
}

SolverState saprek_step(const Mat& a, const Vec& b, const SolverState& state, int i, int j,
                        double eps) {
    if (!(eps > 0.0)) throw NonPositiveEpsilon("saprek_step: eps must be positive");
    const std::size_t m = static_cast<std::size_t>(a.rows());
    const std::size_t n = static_cast<std::size_t>(a.cols());
    if (state.z.size() != m || state.x.size() != n || b.size() != m) {
        throw DimensionMismatch("saprek_step: size mismatch");
    }
    const Vec col = extract_column(a, j);
    const double* row = a.row_ptr(i);
    const double ni2 = kernels::dot(row, row, n);
    const double nj2 = kernels::dot(col.data(), col.data(), m);
    if (nj2 == 0.0) throw ZeroColumn("saprek_step: column has zero norm");
    SolverState out{state.z, state.x, state.k + 1};
    saprek_core(row, n, col.data(), m, ni2, nj2, a(i, j), b[i], eps, i, out.z, out.x);
    return out;
}

namespace {

void check_initial_iterates(const SvdResult& f, const Vec& b, const Vec& x0, const Vec& z0,
                            bool check_z) {
    // x0 must lie in range(A^T) = span(V).
    Vec coeff = matvec_transpose(f.v, x0);
    Vec proj = matvec(f.v, coeff);
    if (std::sqrt(sqdist(x0, proj)) > 1e-9 * (1.0 + norm(x0))) {
        throw PreconditionViolated("run_solver: x0 not in range(A^T)");
    }
    if (!check_z) return;
    // z0 - b must lie in range(A) = span(U).
    Vec w = z0 - b;
    Vec uc = matvec_transpose(f.u, w);
    Vec up = matvec(f.u, uc);
    if (std::sqrt(sqdist(w, up)) > 1e-9 * (1.0 + norm(w))) {
        throw PreconditionViolated("run_solver: z0 not in b + range(A)");
    }
}

} // namespace

TrialRecord run_solver(const LinearSystem& system, const MethodConfig& config, long iterations,
                       SeededStream& stream, long record_every) {
    if (iterations < 0) throw Error("run_solver: iterations must be nonnegative");
    if (record_every < 1) throw Error("run_solver: record_every must be >= 1");

    const Mat& a = system.a;
    const Vec& b = system.b;
    const std::size_t m = static_cast<std::size_t>(a.rows());
    const std::size_t n = static_cast<std::size_t>(a.cols());

    const bool is_saprek = config.method == Method::SAPREK;
    if (is_saprek) {
        if (!config.eps || !(*config.eps > 0.0)) {
            throw NonPositiveEpsilon("run_solver: SAPREK requires eps > 0");
        }
    } else if (config.eps) {
        throw Error("run_solver: eps is only meaningful for SAPREK");
    }
    const double eps = is_saprek ? *config.eps : 0.0;

    // Exact references, computed once from a single factorization.
    const SvdResult f = svd(a);
    const Vec x_star = pseudo_solve(f, b);
    const Vec z_star = project_null_transpose(f, b);

    Vec x = config.x0 ? *config.x0 : Vec(n, 0.0);
    Vec z = config.z0 ? *config.z0 : b;
    if (x.size() != n || z.size() != m) {
        throw DimensionMismatch("run_solver: initial iterate size mismatch");
    }
    check_initial_iterates(f, b, x, z, config.method != Method::RK);

    // Row-major transpose makes column accesses contiguous in the loop.
    const Mat at = transpose(a);
    const Vec rn = row_sq_norms(a);
    const Vec cn = row_sq_norms(at);

    const DiscreteDistribution rows =
        is_saprek ? row_probs_eps(a, eps) : row_probs_rk(a);
    const DiscreteDistribution cols = col_probs(a);

    TrialRecord record;
    record.seed = stream.seed();
    record.config = config;

    auto push_sample = [&](long k) {
        const double ex = kernels::sqdist(x.data(), x_star.data(), n);
        const double ez = kernels::sqdist(z.data(), z_star.data(), m);
        record.samples.push_back({k, ex, ez, ez + eps * ex});
    };

    push_sample(0);
    for (long k = 1; k <= iterations; ++k) {
        const int i = sample(rows, stream);
        switch (config.method) {
            case Method::RK: {
                const double* row = a.row_ptr(i);
                const double gamma = (kernels::dot(row, x.data(), n) - b[i]) / rn[i];
                kernels::axpy(-gamma, row, x.data(), n);
                break;
            }
            case Method::REK: {
                const int j = sample(cols, stream);
                rek_core(a.row_ptr(i), n, at.row_ptr(j), m, rn[i], cn[j], b[i], i, z, x);
                break;
            }
            case Method::SAPREK: {
                const int j = sample(cols, stream);
                saprek_core(a.row_ptr(i), n, at.row_ptr(j), m, rn[i], cn[j], a(i, j), b[i], eps,
                            i, z, x);
                break;
            }
        }
        if (k % record_every == 0 || k == iterations) push_sample(k);
    }
    return record;
}

} // namespace saprek
