#pragma once

// Shared helpers for the test suites. The oracles here are deliberately
// independent of the library code paths they are used to check.

#include <cmath>
#include <vector>

#include "saprek/dense.hpp"
#include "saprek/sampling.hpp"

namespace test_support {

inline saprek::Mat random_gaussian(saprek::SeededStream& stream, int m, int n) {
    saprek::Mat a(m, n);
    for (std::size_t k = 0; k < a.size(); ++k) a.data()[k] = stream.next_gaussian();
    return a;
}

inline saprek::Vec random_gaussian_vec(saprek::SeededStream& stream, int n) {
    saprek::Vec v(n);
    for (double& x : v) x = stream.next_gaussian();
    return v;
}

inline saprek::Vec random_uniform_vec(saprek::SeededStream& stream, int n) {
    saprek::Vec v(n);
    for (double& x : v) x = stream.next_uniform();
    return v;
}

inline saprek::Mat normalized(saprek::Mat a) {
    const double f = saprek::frobenius_norm(a);
    for (std::size_t k = 0; k < a.size(); ++k) a.data()[k] /= f;
    return a;
}

inline double max_abs_diff(const saprek::Mat& a, const saprek::Mat& b) {
    double worst = 0.0;
    for (int r = 0; r < a.rows(); ++r) {
        for (int c = 0; c < a.cols(); ++c) worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
    }
    return worst;
}

inline double max_abs_diff(const saprek::Vec& a, const saprek::Vec& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    return worst;
}

// Dense square solve with partial pivoting; used as an oracle for
// projection problems phrased as KKT systems.
inline saprek::Vec lu_solve(saprek::Mat a, saprek::Vec b) {
    const int n = a.rows();
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        }
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
            std::swap(b[col], b[pivot]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double factor = a(r, col) / a(col, col);
            for (int c = col; c < n; ++c) a(r, c) -= factor * a(col, c);
            b[r] -= factor * b[col];
        }
    }
    saprek::Vec x(n);
    for (int r = n - 1; r >= 0; --r) {
        double sum = b[r];
        for (int c = r + 1; c < n; ++c) sum -= a(r, c) * x[c];
        x[r] = sum / a(r, r);
    }
    return x;
}

} // namespace test_support
