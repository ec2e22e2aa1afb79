#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "saprek/dense.hpp"
#include "saprek/sampling.hpp"

namespace saprek {

/// A dense system A x = b (possibly inconsistent).
struct LinearSystem {
    Mat a;
    Vec b;

    LinearSystem(Mat a_, Vec b_);
};

enum class Method { RK, REK, SAPREK };

struct MethodConfig {
    Method method = Method::REK;
    /// Projection-metric parameter; required for SAPREK, absent otherwise.
    std::optional<double> eps;
    /// Initial iterates; default to the standard choices x0 = 0, z0 = b.
    std::optional<Vec> x0;
    std::optional<Vec> z0;
};

/// Paired iterates (z^k, x^k) plus the iteration counter.
struct SolverState {
    Vec z;
    Vec x;
    long k = 0;
};

struct TrialSample {
    long k;
    double err_x;         // |x^k - x*|^2
    double err_z;         // |z^k - z*|^2
    double err_combined;  // err_z + eps * err_x (eps = 0 for RK/REK)
};

struct TrialRecord {
    std::vector<TrialSample> samples;
    std::uint64_t seed = 0;
    MethodConfig config;
};

/// One RK update: project x onto the hyperplane {y : A_i: y = b_i}.
Vec rk_step(const Mat& a, const Vec& b, const Vec& x, int i);

/// One REK update with the freshly updated z (z^{k+1} convention).
SolverState rek_step(const Mat& a, const Vec& b, const SolverState& state, int i, int j);

/// One SAP-REK(eps) update in the explicit scalar form: the 2x2 sketched
/// Gram matrix [[|A_:j|^2, A_ij], [A_ij, 1 + |A_i:|^2/eps]] is inverted in
/// closed form; its determinant is positive whenever column j is nonzero.
SolverState saprek_step(const Mat& a, const Vec& b, const SolverState& state, int i, int j,
                        double eps);

/// Run a solver for a fixed iteration budget, recording error metrics
/// against the exact references x* = A^+ b and z* = (I - A A^+) b at
/// k = 0, every record_every iterations, and the final iterate.
TrialRecord run_solver(const LinearSystem& system, const MethodConfig& config, long iterations,
                       SeededStream& stream, long record_every = 1);

} // namespace saprek
