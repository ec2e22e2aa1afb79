#pragma once

#include <cstdint>

#include "saprek/dense.hpp"

namespace saprek {

/// Normalized discrete distribution over indices 0..size-1 with a
/// precomputed cumulative table for inverse-CDF sampling.
class DiscreteDistribution {
public:
    explicit DiscreteDistribution(Vec probabilities);

    int size() const { return static_cast<int>(probs_.size()); }
    double prob(int i) const { return probs_[i]; }
    const Vec& probabilities() const { return probs_; }
    const Vec& cumulative() const { return cum_; }

private:
    Vec probs_;
    Vec cum_;
};

/// SplitMix64 stream. Counter-based (Weyl sequence + finalizer), so the
/// sequence for a given seed is identical across runs and platforms.
/// Single-owner mutable state: one stream per trial, never shared.
class SeededStream {
public:
    explicit SeededStream(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64();
    double next_uniform();   // [0, 1)
    double next_gaussian();  // standard normal via Box-Muller

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

/// Row distribution p_i = |A_i:|^2 / |A|_F^2.
DiscreteDistribution row_probs_rk(const Mat& a);

/// Column distribution p_j = |A_:j|^2 / |A|_F^2.
DiscreteDistribution col_probs(const Mat& a);

/// Row distribution p_i = (1 + |A_i:|^2/eps) / (m + |A|_F^2/eps).
DiscreteDistribution row_probs_eps(const Mat& a, double eps);

/// One inverse-CDF draw (binary search over the cumulative table).
int sample(const DiscreteDistribution& dist, SeededStream& stream);

} // namespace saprek
