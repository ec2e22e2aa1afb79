#include "saprek/kernels.hpp"

#include <cstddef>

#if defined(__x86_64__) || defined(_M_X64)
#define SAPREK_X86 1
#include <immintrin.h>
#else
#define SAPREK_X86 0
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
#define SAPREK_NEON 1
#include <arm_neon.h>
#else
#define SAPREK_NEON 0
#endif

namespace saprek::kernels {

// ---------------------------------------------------------------------------
// Scalar reference kernels
// ---------------------------------------------------------------------------

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sqdist_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = x[i] - y[i];
        acc += d * d;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// AVX2 + FMA kernels (x86-64)
// ---------------------------------------------------------------------------

#if SAPREK_X86

__attribute__((target("avx2,fma")))
static double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    __m128d lo = _mm256_castpd256_pd128(acc0);
    __m128d hi = _mm256_extractf128_pd(acc0, 1);
    lo = _mm_add_pd(lo, hi);
    double acc = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

__attribute__((target("avx2,fma")))
static void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    __m256d a = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yv = _mm256_loadu_pd(y + i);
        yv = _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), yv);
        _mm256_storeu_pd(y + i, yv);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

__attribute__((target("avx2,fma")))
static double sqdist_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    lo = _mm_add_pd(lo, hi);
    double s = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) {
        double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

#endif // SAPREK_X86

// ---------------------------------------------------------------------------
// NEON kernels (ARM64; baseline feature, no runtime check needed)
// ---------------------------------------------------------------------------

#if SAPREK_NEON

static double dot_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
    }
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

static void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    float64x2_t a = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t yv = vld1q_f64(y + i);
        yv = vfmaq_f64(yv, a, vld1q_f64(x + i));
        vst1q_f64(y + i, yv);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

static double sqdist_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t d = vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
        acc = vfmaq_f64(acc, d, d);
    }
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) {
        double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

#endif // SAPREK_NEON

// ---------------------------------------------------------------------------
// Runtime dispatch
// ---------------------------------------------------------------------------

namespace {

using DotFn = double (*)(const double*, const double*, std::size_t);
using AxpyFn = void (*)(double, const double*, double*, std::size_t);
using SqdistFn = double (*)(const double*, const double*, std::size_t);

struct Dispatch {
    DotFn dot;
    AxpyFn axpy;
    SqdistFn sqdist;
    const char* name;
};

Dispatch select_backend() {
#if SAPREK_X86
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return {dot_avx2, axpy_avx2, sqdist_avx2, "avx2"};
    }
#elif SAPREK_NEON
    return {dot_neon, axpy_neon, sqdist_neon, "neon"};
#endif
    return {dot_scalar, axpy_scalar, sqdist_scalar, "scalar"};
}

const Dispatch& backend() {
    static const Dispatch d = select_backend();
    return d;
}

} // namespace

double dot(const double* x, const double* y, std::size_t n) {
    return backend().dot(x, y, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    backend().axpy(alpha, x, y, n);
}

double sqdist(const double* x, const double* y, std::size_t n) {
    return backend().sqdist(x, y, n);
}

const char* active_backend() {
    return backend().name;
}

} // namespace saprek::kernels
