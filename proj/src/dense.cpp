#include "saprek/dense.hpp"

#include <cmath>
#include <utility>

#include "saprek/kernels.hpp"

namespace saprek {

Mat::Mat(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw DimensionMismatch("matrix dimensions must be nonnegative");
}

Mat::Mat(int rows, int cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (a_.size() != static_cast<std::size_t>(rows) * cols) {
        throw DimensionMismatch("entry count does not match rows*cols");
    }
}

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double dot(const Vec& x, const Vec& y) {
    if (x.size() != y.size()) throw DimensionMismatch("dot: size mismatch");
    return kernels::dot(x.data(), y.data(), x.size());
}

double norm_sq(const Vec& x) {
    return kernels::dot(x.data(), x.data(), x.size());
}

double norm(const Vec& x) {
    return std::sqrt(norm_sq(x));
}

double sqdist(const Vec& x, const Vec& y) {
    if (x.size() != y.size()) throw DimensionMismatch("sqdist: size mismatch");
    return kernels::sqdist(x.data(), y.data(), x.size());
}

Vec operator+(const Vec& x, const Vec& y) {
    if (x.size() != y.size()) throw DimensionMismatch("vector add: size mismatch");
    Vec r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
    return r;
}

Vec operator-(const Vec& x, const Vec& y) {
    if (x.size() != y.size()) throw DimensionMismatch("vector sub: size mismatch");
    Vec r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
    return r;
}

Vec scaled(const Vec& x, double alpha) {
    Vec r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = alpha * x[i];
    return r;
}

Mat transpose(const Mat& a) {
    Mat t(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    }
    return t;
}

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dimensions differ");
    Mat c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        double* ci = c.row_ptr(i);
        for (int k = 0; k < a.cols(); ++k) {
            kernels::axpy(a(i, k), b.row_ptr(k), ci, static_cast<std::size_t>(b.cols()));
        }
    }
    return c;
}

Vec matvec(const Mat& a, const Vec& x) {
    if (static_cast<int>(x.size()) != a.cols()) throw DimensionMismatch("matvec: size mismatch");
    Vec y(a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        y[i] = kernels::dot(a.row_ptr(i), x.data(), x.size());
    }
    return y;
}

Vec matvec_transpose(const Mat& a, const Vec& x) {
    if (static_cast<int>(x.size()) != a.rows()) throw DimensionMismatch("matvec_transpose: size mismatch");
    Vec y(a.cols(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        kernels::axpy(x[i], a.row_ptr(i), y.data(), y.size());
    }
    return y;
}

double frobenius_norm(const Mat& a) {
    return std::sqrt(kernels::dot(a.data(), a.data(), a.size()));
}

double max_abs(const Mat& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i]));
    return m;
}

Vec row_sq_norms(const Mat& a) {
    Vec r(a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        r[i] = kernels::dot(a.row_ptr(i), a.row_ptr(i), static_cast<std::size_t>(a.cols()));
    }
    return r;
}

Vec col_sq_norms(const Mat& a) {
    Vec c(a.cols(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        const double* row = a.row_ptr(i);
        for (int j = 0; j < a.cols(); ++j) c[j] += row[j] * row[j];
    }
    return c;
}

bool is_zero(const Mat& a) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.data()[i] != 0.0) return false;
    }
    return true;
}

bool all_finite(const Vec& x) {
    for (double v : x) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

bool all_finite(const Mat& a) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!std::isfinite(a.data()[i])) return false;
    }
    return true;
}

void require_finite(const Vec& x, const char* what) {
    if (!all_finite(x)) throw Error(std::string(what) + ": non-finite entries");
}

void require_finite(const Mat& a, const char* what) {
    if (!all_finite(a)) throw Error(std::string(what) + ": non-finite entries");
}

} // namespace saprek
