#include "saprek/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "saprek/kernels.hpp"

namespace saprek {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// One-sided Jacobi on a matrix with rows >= cols: orthogonalizes the
// columns of w in place, accumulating the rotations into v.
void jacobi_orthogonalize(Mat& w, Mat& v) {
    const int n = w.cols();
    const int m = w.rows();
    const int max_sweeps = 60;
    const double tol = 1e-15;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (int k = 0; k < m; ++k) {
                    const double wp = w(k, p);
                    const double wq = w(k, q);
                    alpha += wp * wp;
                    beta += wq * wq;
                    gamma += wp * wq;
                }
                if (gamma == 0.0) continue;
                if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;

                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;

                for (int k = 0; k < m; ++k) {
                    const double wp = w(k, p);
                    const double wq = w(k, q);
                    w(k, p) = c * wp - s * wq;
                    w(k, q) = s * wp + c * wq;
                }
                for (int k = 0; k < n; ++k) {
                    const double vp = v(k, p);
                    const double vq = v(k, q);
                    v(k, p) = c * vp - s * vq;
                    v(k, q) = s * vp + c * vq;
                }
                rotated = true;
            }
        }
        if (!rotated) break;
    }
}

SvdResult svd_tall(const Mat& a) {
    const int m = a.rows();
    const int n = a.cols();

    Mat w = a;
    Mat v = Mat::identity(n);
    jacobi_orthogonalize(w, v);

    // Column norms are the singular values; sort non-increasing.
    Vec sig(n);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += w(k, j) * w(k, j);
        sig[j] = std::sqrt(s);
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return sig[i] > sig[j]; });

    const double sig_max = sig[order[0]];
    const double threshold = std::max(m, n) * kEps * sig_max;
    int rank = 0;
    while (rank < n && sig[order[rank]] > threshold) ++rank;

    SvdResult f;
    f.rank = rank;
    f.u = Mat(m, rank);
    f.v = Mat(n, rank);
    f.sigma = Vec(rank);
    for (int c = 0; c < rank; ++c) {
        const int j = order[c];
        const double s = sig[j];
        f.sigma[c] = s;
        for (int k = 0; k < m; ++k) f.u(k, c) = w(k, j) / s;
        for (int k = 0; k < n; ++k) f.v(k, c) = v(k, j);
    }
    return f;
}

} // namespace

SvdResult svd(const Mat& a) {
    if (a.rows() == 0 || a.cols() == 0 || is_zero(a)) {
        throw ZeroMatrix("svd: matrix is zero");
    }
    if (a.rows() >= a.cols()) return svd_tall(a);
    SvdResult f = svd_tall(transpose(a));
    std::swap(f.u, f.v);
    return f;
}

double sigma_min_positive(const SvdResult& f) {
    return f.sigma[f.rank - 1];
}

double sigma_min_positive(const Mat& a) {
    return sigma_min_positive(svd(a));
}

Vec pseudo_solve(const SvdResult& f, const Vec& b) {
    if (static_cast<int>(b.size()) != f.u.rows()) {
        throw DimensionMismatch("pseudo_solve: rhs size mismatch");
    }
    // x = V diag(1/sigma) U^T b
    Vec t = matvec_transpose(f.u, b);
    for (int c = 0; c < f.rank; ++c) t[c] /= f.sigma[c];
    return matvec(f.v, t);
}

Vec pseudo_solve(const Mat& a, const Vec& b) {
    return pseudo_solve(svd(a), b);
}

Vec project_null_transpose(const SvdResult& f, const Vec& b) {
    if (static_cast<int>(b.size()) != f.u.rows()) {
        throw DimensionMismatch("project_null_transpose: rhs size mismatch");
    }
    // (I - U U^T) b
    Vec t = matvec_transpose(f.u, b);
    Vec r = b;
    for (int c = 0; c < f.rank; ++c) {
        for (int k = 0; k < f.u.rows(); ++k) r[k] -= f.u(k, c) * t[c];
    }
    return r;
}

Vec project_null_transpose(const Mat& a, const Vec& b) {
    return project_null_transpose(svd(a), b);
}

Mat pseudo_inverse(const Mat& a) {
    SvdResult f = svd(a);
    // A^+ = V diag(1/sigma) U^T
    Mat p(a.cols(), a.rows());
    for (int i = 0; i < a.cols(); ++i) {
        for (int j = 0; j < a.rows(); ++j) {
            double s = 0.0;
            for (int c = 0; c < f.rank; ++c) s += f.v(i, c) * f.u(j, c) / f.sigma[c];
            p(i, j) = s;
        }
    }
    return p;
}

Vec symmetric_eigenvalues(Mat a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("symmetric_eigenvalues: not square");
    const int n = a.rows();
    const int max_sweeps = 50;

    double scale = max_abs(a);
    if (scale == 0.0) return Vec(n, 0.0);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        }
        if (std::sqrt(off) <= 1e-15 * scale * n) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-18 * scale) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }

    Vec eig(n);
    for (int i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

double lambda_min_positive(const Vec& eigenvalues, double rel_threshold) {
    double lam_max = 0.0;
    for (double e : eigenvalues) lam_max = std::max(lam_max, e);
    if (lam_max <= 0.0) throw ZeroMatrix("lambda_min_positive: no positive eigenvalue");
    const double threshold = rel_threshold * lam_max;
    double best = lam_max;
    for (double e : eigenvalues) {
        if (e > threshold) best = std::min(best, e);
    }
    return best;
}

double lambda_min_positive(const Mat& symmetric, double rel_threshold) {
    return lambda_min_positive(symmetric_eigenvalues(symmetric), rel_threshold);
}

Vec cholesky_solve(const Mat& s, const Vec& b) {
    const int n = s.rows();
    if (s.cols() != n || static_cast<int>(b.size()) != n) {
        throw DimensionMismatch("cholesky_solve: dimension mismatch");
    }
    Mat l(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = s(i, j);
            for (int k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
            if (i == j) {
                if (sum <= 0.0) throw Error("cholesky_solve: matrix is not positive definite");
                l(i, i) = std::sqrt(sum);
            } else {
                l(i, j) = sum / l(j, j);
            }
        }
    }
    Vec y(n);
    for (int i = 0; i < n; ++i) {
        double sum = b[i];
        for (int k = 0; k < i; ++k) sum -= l(i, k) * y[k];
        y[i] = sum / l(i, i);
    }
    Vec x(n);
    for (int i = n - 1; i >= 0; --i) {
        double sum = y[i];
        for (int k = i + 1; k < n; ++k) sum -= l(k, i) * x[k];
        x[i] = sum / l(i, i);
    }
    return x;
}

} // namespace saprek
