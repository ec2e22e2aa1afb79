#pragma once

#include <cstddef>

// Dense inner-loop kernels. Every kernel has a scalar reference
// implementation; on x86-64 an AVX2/FMA variant is selected at runtime,
// on ARM64 a NEON variant is compiled in. SIMD variants reassociate
// sums, so results may differ from the scalar reference by O(n·eps);
// the equivalence tests bound that gap.

namespace saprek::kernels {

// Scalar reference kernels.
double dot_scalar(const double* x, const double* y, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
double sqdist_scalar(const double* x, const double* y, std::size_t n);

// Dispatched entry points (pick the best variant for the host once).
double dot(const double* x, const double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sqdist(const double* x, const double* y, std::size_t n);

// Name of the variant the dispatcher selected: "scalar", "avx2" or "neon".
const char* active_backend();

} // namespace saprek::kernels
