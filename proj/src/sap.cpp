#include "saprek/sap.hpp"

#include <cmath>

#include "saprek/kernels.hpp"
#include "saprek/linalg.hpp"

namespace saprek {

EmbeddedSystem build_embedded_system(const Mat& a, const Vec& b) {
    const int m = a.rows();
    const int n = a.cols();
    if (static_cast<int>(b.size()) != m) {
        throw DimensionMismatch("build_embedded_system: b size must equal row count");
    }
    Mat big(n + m, m + n);
    // Upper-left A^T, upper-right 0.
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < m; ++c) big(r, c) = a(c, r);
    }
    // Lower-left I, lower-right A.
    for (int r = 0; r < m; ++r) {
        big(n + r, r) = 1.0;
        for (int c = 0; c < n; ++c) big(n + r, m + c) = a(r, c);
    }
    Vec c(n + m, 0.0);
    for (int r = 0; r < m; ++r) c[n + r] = b[r];
    return {std::move(big), std::move(c), m, n};
}

Mat SketchMatrix::dense() const {
    Mat s(a_cols + a_rows, 2);
    s(j, 0) = 1.0;
    s(a_cols + i, 1) = 1.0;
    return s;
}

Vec ProjectionMetric::diagonal() const {
    if (!(eps > 0.0)) throw NonPositiveEpsilon("ProjectionMetric: eps must be positive");
    Vec d(a_rows + a_cols, 1.0);
    for (int k = a_rows; k < a_rows + a_cols; ++k) d[k] = eps;
    return d;
}

Mat ProjectionMetric::dense() const {
    Mat b(a_rows + a_cols, a_rows + a_cols);
    const Vec d = diagonal();
    for (int k = 0; k < b.rows(); ++k) b(k, k) = d[k];
    return b;
}

namespace {

// Pseudoinverse that tolerates an all-zero input (zero sketches yield a
// zero Gram matrix, whose pseudoinverse is zero).
Mat pinv_or_zero(const Mat& g) {
    if (is_zero(g)) return Mat(g.cols(), g.rows());
    return pseudo_inverse(g);
}

// Columnwise B^{-1} K via Cholesky.
Mat spd_solve_matrix(const Mat& b, const Mat& k) {
    Mat w(k.rows(), k.cols());
    Vec col(k.rows());
    for (int c = 0; c < k.cols(); ++c) {
        for (int r = 0; r < k.rows(); ++r) col[r] = k(r, c);
        Vec sol = cholesky_solve(b, col);
        for (int r = 0; r < k.rows(); ++r) w(r, c) = sol[r];
    }
    return w;
}

} // namespace

Vec sap_step(const Mat& m, const Vec& c, const Mat& b_spd, const Mat& s, const Vec& y) {
    if (s.rows() != m.rows() || static_cast<int>(c.size()) != m.rows() ||
        static_cast<int>(y.size()) != m.cols() || b_spd.rows() != m.cols() ||
        b_spd.cols() != m.cols()) {
        throw DimensionMismatch("sap_step: dimension mismatch");
    }
    const Mat k = matmul(transpose(m), s);   // M^T S
    const Mat w = spd_solve_matrix(b_spd, k); // B^{-1} M^T S
    const Mat g = matmul(transpose(k), w);    // S^T M B^{-1} M^T S
    // Sketched residual S^T (M y - c).
    const Vec res = matvec(m, y) - c;
    Vec sres = matvec_transpose(s, res);
    const Vec gain = matvec(pinv_or_zero(g), sres);
    Vec out = y;
    for (int r = 0; r < w.rows(); ++r) {
        out[r] -= kernels::dot(w.row_ptr(r), gain.data(), gain.size());
    }
    return out;
}

Vec sap_step(const EmbeddedSystem& sys, const ProjectionMetric& b, const SketchMatrix& s,
             const Vec& y) {
    return sap_step(sys.m, sys.c, b.dense(), s.dense(), y);
}

std::pair<Vec, Vec> rek_matrix_step(const Mat& a, const Vec& b, const Vec& z, const Vec& x,
                                    int i, int j) {
    const std::size_t m = static_cast<std::size_t>(a.rows());
    const std::size_t n = static_cast<std::size_t>(a.cols());
    if (z.size() != m || x.size() != n || b.size() != m) {
        throw DimensionMismatch("rek_matrix_step: size mismatch");
    }
    Vec col(m);
    for (std::size_t r = 0; r < m; ++r) col[r] = a(static_cast<int>(r), j);
    const double* row = a.row_ptr(i);
    const double nj2 = kernels::dot(col.data(), col.data(), m);
    const double ni2 = kernels::dot(row, row, n);
    if (ni2 == 0.0) throw ZeroRow("rek_matrix_step: row has zero norm");
    if (nj2 == 0.0) throw ZeroColumn("rek_matrix_step: column has zero norm");

    const double r1 = kernels::dot(col.data(), z.data(), m);
    // e_i^T (I - A_:j A_:j^T / |A_:j|^2) z + A_i: x - b_i
    const double r2 = (z[i] - a(i, j) * r1 / nj2) + kernels::dot(row, x.data(), n) - b[i];

    Vec z_out = z;
    kernels::axpy(-r1 / nj2, col.data(), z_out.data(), m);
    Vec x_out = x;
    kernels::axpy(-r2 / ni2, row, x_out.data(), n);
    return {std::move(z_out), std::move(x_out)};
}

Mat update_matrix_Z(const Mat& m, const Mat& b_spd, const Mat& s) {
    if (s.rows() != m.rows() || b_spd.rows() != m.cols() || b_spd.cols() != m.cols()) {
        throw DimensionMismatch("update_matrix_Z: dimension mismatch");
    }
    const Mat k = matmul(transpose(m), s);
    const Mat g = matmul(transpose(k), spd_solve_matrix(b_spd, k));
    return matmul(matmul(k, pinv_or_zero(g)), transpose(k));
}

Mat update_matrix_Z(const EmbeddedSystem& sys, const ProjectionMetric& b,
                    const SketchMatrix& s) {
    return update_matrix_Z(sys.m, b.dense(), s.dense());
}

BlockStructureReport block_structure_report(const std::vector<Mat>& zs, const Mat& b,
                                            int top_rows, double tolerance) {
    BlockStructureReport report;
    report.tolerance = tolerance;
    for (const Mat& z : zs) {
        if (z.rows() != b.rows() || z.cols() != b.rows()) {
            throw DimensionMismatch("block_structure_report: Z/B size mismatch");
        }
        const Mat binv_z = spd_solve_matrix(b, z);
        double tr = 0.0, bl = 0.0;
        for (int r = 0; r < top_rows; ++r) {
            for (int c = top_rows; c < z.cols(); ++c) tr = std::max(tr, std::abs(binv_z(r, c)));
        }
        for (int r = top_rows; r < z.rows(); ++r) {
            for (int c = 0; c < top_rows; ++c) bl = std::max(bl, std::abs(binv_z(r, c)));
        }
        const bool equivalent = (tr <= tolerance) == (bl <= tolerance);
        report.entries.push_back({tr, bl, equivalent});
        report.all_equivalent = report.all_equivalent && equivalent;
    }
    return report;
}

} // namespace saprek
