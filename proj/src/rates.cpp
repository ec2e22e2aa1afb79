#include "saprek/rates.hpp"

#include <algorithm>
#include <cmath>

#include "saprek/kernels.hpp"
#include "saprek/linalg.hpp"

namespace saprek {

double rk_rate(const Mat& a) {
    const double f = frobenius_norm(a);
    if (f == 0.0) throw ZeroMatrix("rk_rate: matrix is zero");
    const double smin = sigma_min_positive(a);
    return std::max(0.0, 1.0 - (smin * smin) / (f * f));
}

double rk_horizon(const Mat& a, const Vec& b) {
    if (is_zero(a)) throw ZeroMatrix("rk_horizon: matrix is zero");
    const Vec x_star = pseudo_solve(a, b);
    const Vec residual = matvec(a, x_star) - b;
    const Vec rn = row_sq_norms(a);
    double h = 0.0;
    for (int i = 0; i < a.rows(); ++i) {
        if (rn[i] == 0.0) continue;  // never sampled
        h = std::max(h, std::abs(residual[i]) / rn[i]);
    }
    return h;
}

double rek_bound(const Mat& a, const Vec& b, const Vec& x0, const Vec& z0, long k) {
    if (is_zero(a)) throw ZeroMatrix("rek_bound: matrix is zero");
    const SvdResult f = svd(a);
    const Vec x_star = pseudo_solve(f, b);
    const Vec z_perp = project_null_transpose(f, b);

    // x0 in range(A^T), z0 in b + range(A).
    {
        Vec proj = matvec(f.v, matvec_transpose(f.v, x0));
        if (std::sqrt(sqdist(x0, proj)) > 1e-9 * (1.0 + norm(x0))) {
            throw PreconditionViolated("rek_bound: x0 not in range(A^T)");
        }
        Vec w = z0 - b;
        Vec wp = matvec(f.u, matvec_transpose(f.u, w));
        if (std::sqrt(sqdist(w, wp)) > 1e-9 * (1.0 + norm(w))) {
            throw PreconditionViolated("rek_bound: z0 not in b + range(A)");
        }
    }

    const double fro = frobenius_norm(a);
    const double smin = sigma_min_positive(f);
    const double rho = std::pow(1.0 - (smin * smin) / (fro * fro), static_cast<double>(k));
    const double xerr0 = sqdist(x0, x_star);
    const double zerr0 = sqdist(z0, z_perp);
    return rho * xerr0 + rho * (1.0 - rho) / smin * zerr0;
}

ExpectedUpdateMatrix expected_update_matrix(const Mat& a, double eps, ExpectationMode mode) {
    if (!(eps > 0.0)) throw NonPositiveEpsilon("expected_update_matrix: eps must be positive");
    if (is_zero(a)) throw ZeroMatrix("expected_update_matrix: matrix is zero");

    const int m = a.rows();
    const int n = a.cols();
    const Mat at = transpose(a);
    const Vec rn = row_sq_norms(a);
    const Vec cn = row_sq_norms(at);
    double fro2 = 0.0;
    for (double v : rn) fro2 += v;

    const double row_denom = m + fro2 / eps;
    const double sqrt_eps = std::sqrt(eps);

    Mat w(m + n, m + n);
    for (int j = 0; j < n; ++j) {
        if (cn[j] == 0.0) continue;  // probability zero, skip to avoid 0/0
        const double pj = cn[j] / fro2;
        const double* col = at.row_ptr(j);
        for (int i = 0; i < m; ++i) {
            const double d = 1.0 + rn[i] / eps;
            const double pi = d / row_denom;
            const double aij = a(i, j);
            const double den =
                mode == ExpectationMode::DroppedTerm ? cn[j] * d : cn[j] * d - aij * aij;
            const double wgt = pi * pj / den;
            const double* row = a.row_ptr(i);

            // Top-left block (m x m):
            //   d col col^T - aij (col e_i^T + e_i col^T) + |col|^2 e_i e_i^T
            for (int r = 0; r < m; ++r) {
                kernels::axpy(wgt * d * col[r], col, w.row_ptr(r), static_cast<std::size_t>(m));
            }
            if (aij != 0.0) {
                for (int r = 0; r < m; ++r) w(r, i) -= wgt * aij * col[r];
                kernels::axpy(-wgt * aij, col, w.row_ptr(i), static_cast<std::size_t>(m));
            }
            w(i, i) += wgt * cn[j];

            // Top-right block (m x n), scaled by 1/sqrt(eps):
            //   -aij col row + |col|^2 e_i row
            const double tr_scale = wgt / sqrt_eps;
            for (int r = 0; r < m; ++r) {
                const double coef = tr_scale * (-aij * col[r] + (r == i ? cn[j] : 0.0));
                if (coef != 0.0) {
                    kernels::axpy(coef, row, w.row_ptr(r) + m, static_cast<std::size_t>(n));
                }
            }

            // Bottom-right block (n x n), scaled by 1/eps: |col|^2 row^T row.
            const double br_scale = wgt / eps * cn[j];
            for (int r = 0; r < n; ++r) {
                if (row[r] != 0.0) {
                    kernels::axpy(br_scale * row[r], row, w.row_ptr(m + r) + m,
                                  static_cast<std::size_t>(n));
                }
            }
        }
    }
    // Mirror the bottom-left block so the result is exactly symmetric.
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < n; ++c) w(m + c, r) = w(r, m + c);
    }
    return {std::move(w), eps, mode};
}

namespace {

Mat normalized_copy(const Mat& a) {
    const double f = frobenius_norm(a);
    if (f == 0.0) throw ZeroMatrix("matrix is zero");
    Mat out = a;
    for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] /= f;
    return out;
}

} // namespace

Mat w_eps_closed_form(const Mat& a, double eps) {
    if (!(eps > 0.0)) throw NonPositiveEpsilon("w_eps_closed_form: eps must be positive");
    const Mat ah = normalized_copy(a);
    const int m = ah.rows();
    const int n = ah.cols();
    const double scale = 1.0 / (m + 1.0 / eps);
    const double sqrt_eps = std::sqrt(eps);

    const Mat aat = matmul(ah, transpose(ah));
    const Mat ata = matmul(transpose(ah), ah);

    Mat w(m + n, m + n);
    // Top-left: scale ((m - 2 + 1/eps) A A^T + I).
    const double tl_coef = scale * (m - 2.0 + 1.0 / eps);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) w(r, c) = tl_coef * aat(r, c);
        w(r, r) += scale;
    }
    // Top-right: scale / sqrt(eps) A (I - A^T A); bottom-left is its transpose.
    Mat inner = ata;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) inner(r, c) = (r == c ? 1.0 : 0.0) - ata(r, c);
    }
    const Mat tr = matmul(ah, inner);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < n; ++c) {
            const double v = scale / sqrt_eps * tr(r, c);
            w(r, m + c) = v;
            w(m + c, r) = v;
        }
    }
    // Bottom-right: scale / eps A^T A.
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) w(m + r, m + c) = scale / eps * ata(r, c);
    }
    return w;
}

Mat w_eps_from_svd(const Mat& a, double eps) {
    if (!(eps > 0.0)) throw NonPositiveEpsilon("w_eps_from_svd: eps must be positive");
    const Mat ah = normalized_copy(a);
    const int m = ah.rows();
    const int n = ah.cols();
    const SvdResult f = svd(ah);
    const double scale = 1.0 / (m + 1.0 / eps);
    const double sqrt_eps = std::sqrt(eps);

    Mat w(m + n, m + n);
    // Directions orthogonal to the singular spaces: the z block carries a
    // plain scale * I, the x block nothing.
    for (int r = 0; r < m; ++r) w(r, r) = scale;

    for (int k = 0; k < f.rank; ++k) {
        const double s = f.sigma[k];
        const double tl = scale * (m - 2.0 + 1.0 / eps) * s * s;
        const double tr = scale / sqrt_eps * (s - s * s * s);
        const double br = scale / eps * s * s;
        for (int r = 0; r < m; ++r) {
            const double ur = f.u(r, k);
            for (int c = 0; c < m; ++c) w(r, c) += tl * ur * f.u(c, k);
            for (int c = 0; c < n; ++c) w(r, m + c) += tr * ur * f.v(c, k);
        }
        for (int r = 0; r < n; ++r) {
            const double vr = f.v(r, k);
            for (int c = 0; c < m; ++c) w(m + r, c) += tr * vr * f.u(c, k);
            for (int c = 0; c < n; ++c) w(m + r, m + c) += br * vr * f.v(c, k);
        }
    }
    return w;
}

std::pair<double, double> block_eigenvalues(double sigma, int m, double eps) {
    if (!(eps > 0.0)) throw NonPositiveEpsilon("block_eigenvalues: eps must be positive");
    if (!(sigma > 0.0) || sigma > 1.0 + 1e-9) {
        throw Error("block_eigenvalues: sigma must lie in (0, 1]");
    }
    const double s2 = sigma * sigma;
    const double denom = m + 1.0 / eps;
    const double t = (m - 2.0 + 2.0 / eps) * s2 + 1.0;
    const double disc = t * t / 4.0 - (1.0 / eps) * s2 * s2 * (denom - s2);
    const double root = std::sqrt(std::max(disc, 0.0));
    const double minus = t / (2.0 * denom) - root / denom;
    const double plus = t / (2.0 * denom) + root / denom;
    return {minus, plus};
}

namespace {

// Positive structural eigenvalues of W'_eps: one 2x2 block per retained
// singular value plus (m - rank) diagonal entries 1/(m + 1/eps). The
// remaining (n - rank) eigenvalues are zero by construction and are left
// out, so no numerical threshold is needed here (the block eigenvalues
// are positive for every sigma in (0, 1], however small).
Vec structural_spectrum(const Mat& a, double eps, double* sigma_min_out) {
    if (!(eps > 0.0)) throw NonPositiveEpsilon("eps must be positive");
    const SvdResult f = svd(a);
    const double fro = frobenius_norm(a);
    const int m = a.rows();

    Vec vals;
    for (int k = 0; k < f.rank; ++k) {
        const double s = std::min(f.sigma[k] / fro, 1.0);
        auto [lo, hi] = block_eigenvalues(s, m, eps);
        vals.push_back(lo);
        vals.push_back(hi);
    }
    if (f.rank < m) vals.push_back(1.0 / (m + 1.0 / eps));
    if (sigma_min_out) *sigma_min_out = std::min(f.sigma[f.rank - 1] / fro, 1.0);
    return vals;
}

} // namespace

double lambda_min_plus_w_eps(const Mat& a, double eps) {
    const Vec vals = structural_spectrum(a, eps, nullptr);
    return *std::min_element(vals.begin(), vals.end());
}

double lambda_min_plus_thm5(const Mat& a, double eps) {
    double sigma_min = 0.0;
    structural_spectrum(a, eps, &sigma_min);
    const int m = a.rows();
    auto [lo, hi] = block_eigenvalues(sigma_min, m, eps);
    (void)hi;
    return std::min(1.0 / (m + 1.0 / eps), lo);
}

double lambda_min_plus_at_system_eps(const Mat& a, double eps) {
    if (!(eps > 0.0)) throw NonPositiveEpsilon("lambda_min_plus_at_system_eps: eps must be positive");
    const double fro = frobenius_norm(a);
    if (fro == 0.0) throw ZeroMatrix("lambda_min_plus_at_system_eps: matrix is zero");
    return lambda_min_plus_w_eps(a, eps / (fro * fro));
}

double sap_rate_from_ez(const Mat& ez, const Mat& b_spd) {
    if (ez.rows() != ez.cols() || b_spd.rows() != b_spd.cols() || ez.rows() != b_spd.rows()) {
        throw DimensionMismatch("sap_rate_from_ez: dimension mismatch");
    }
    // B^{-1/2} via the SVD of the SPD metric.
    const SvdResult f = svd(b_spd);
    if (f.rank != b_spd.rows()) throw Error("sap_rate_from_ez: B is singular");
    const int q = ez.rows();
    Mat b_inv_half(q, q);
    for (int r = 0; r < q; ++r) {
        for (int c = 0; c < q; ++c) {
            double s = 0.0;
            for (int k = 0; k < q; ++k) s += f.v(r, k) * f.v(c, k) / std::sqrt(f.sigma[k]);
            b_inv_half(r, c) = s;
        }
    }
    Mat sym = matmul(matmul(b_inv_half, ez), b_inv_half);
    // Clean roundoff asymmetry before the eigensolve.
    for (int r = 0; r < q; ++r) {
        for (int c = r + 1; c < q; ++c) {
            const double v = 0.5 * (sym(r, c) + sym(c, r));
            sym(r, c) = v;
            sym(c, r) = v;
        }
    }
    const double rate = 1.0 - lambda_min_positive(sym);
    return std::clamp(rate, 0.0, 1.0);
}

RateReport rate_report(const Mat& a, double eps) {
    RateReport report;
    report.eps = eps;
    report.normalized = true;
    report.rk_rate = rk_rate(a);
    report.lambda_min_plus = lambda_min_plus_w_eps(a, eps);
    report.lambda_thm5 = lambda_min_plus_thm5(a, eps);
    report.sap_rate = 1.0 - report.lambda_min_plus;

    const SvdResult f = svd(a);
    const double fro = frobenius_norm(a);
    for (int k = 0; k < f.rank; ++k) {
        const double s = std::min(f.sigma[k] / fro, 1.0);
        auto [lo, hi] = block_eigenvalues(s, a.rows(), eps);
        report.block_eigen_pairs.push_back({s, lo, hi});
    }
    return report;
}

} // namespace saprek
