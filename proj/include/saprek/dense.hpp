#pragma once

#include <span>
#include <vector>

#include "saprek/errors.hpp"

namespace saprek {

using Vec = std::vector<double>;

/// Dense row-major matrix of doubles.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols, double fill = 0.0);
    Mat(int rows, int cols, std::vector<double> entries);

    static Mat identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    double* row_ptr(int i) { return a_.data() + static_cast<std::size_t>(i) * cols_; }
    const double* row_ptr(int i) const { return a_.data() + static_cast<std::size_t>(i) * cols_; }
    std::span<const double> row(int i) const { return {row_ptr(i), static_cast<std::size_t>(cols_)}; }

    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }
    std::size_t size() const { return a_.size(); }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

// Vector ops.
double dot(const Vec& x, const Vec& y);
double norm(const Vec& x);
double norm_sq(const Vec& x);
double sqdist(const Vec& x, const Vec& y);
Vec operator+(const Vec& x, const Vec& y);
Vec operator-(const Vec& x, const Vec& y);
Vec scaled(const Vec& x, double alpha);

// Matrix ops.
Mat transpose(const Mat& a);
Mat matmul(const Mat& a, const Mat& b);
Vec matvec(const Mat& a, const Vec& x);
Vec matvec_transpose(const Mat& a, const Vec& x);
double frobenius_norm(const Mat& a);
double max_abs(const Mat& a);
Vec row_sq_norms(const Mat& a);
Vec col_sq_norms(const Mat& a);
bool is_zero(const Mat& a);

// Finite-entry validation (the domain types forbid NaN/Inf).
bool all_finite(const Vec& x);
bool all_finite(const Mat& a);
void require_finite(const Vec& x, const char* what);
void require_finite(const Mat& a, const char* what);

} // namespace saprek
