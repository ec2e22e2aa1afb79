#include "saprek/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace saprek {

DiscreteDistribution::DiscreteDistribution(Vec probabilities) : probs_(std::move(probabilities)) {
    if (probs_.empty()) throw DimensionMismatch("distribution must be nonempty");
    double sum = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0)) throw Error("distribution entries must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw Error("distribution must sum to 1");
    cum_.resize(probs_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        acc += probs_[i];
        cum_[i] = acc;
    }
    cum_.back() = 1.0;
}

std::uint64_t SeededStream::next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SeededStream::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededStream::next_gaussian() {
    // Box-Muller, cosine branch only; two uniforms per draw keeps the
    // stream position independent of call parity.
    const double u1 = 1.0 - next_uniform();  // (0, 1]
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

DiscreteDistribution row_probs_rk(const Mat& a) {
    if (is_zero(a)) throw ZeroMatrix("row_probs_rk: matrix is zero");
    Vec p = row_sq_norms(a);
    double total = 0.0;
    for (double v : p) total += v;
    for (double& v : p) v /= total;
    return DiscreteDistribution(std::move(p));
}

DiscreteDistribution col_probs(const Mat& a) {
    if (is_zero(a)) throw ZeroMatrix("col_probs: matrix is zero");
    Vec p = col_sq_norms(a);
    double total = 0.0;
    for (double v : p) total += v;
    for (double& v : p) v /= total;
    return DiscreteDistribution(std::move(p));
}

DiscreteDistribution row_probs_eps(const Mat& a, double eps) {
    if (!(eps > 0.0)) throw NonPositiveEpsilon("row_probs_eps: eps must be positive");
    Vec p = row_sq_norms(a);
    double total = 0.0;
    for (double& v : p) {
        v = 1.0 + v / eps;
        total += v;
    }
    // total equals m + |A|_F^2/eps; dividing by the accumulated sum makes
    // the entries sum to 1 by construction.
    for (double& v : p) v /= total;
    return DiscreteDistribution(std::move(p));
}

int sample(const DiscreteDistribution& dist, SeededStream& stream) {
    const double u = stream.next_uniform();
    const Vec& c = dist.cumulative();
    auto it = std::upper_bound(c.begin(), c.end(), u);
    if (it == c.end()) --it;  // u == 1 cannot happen, but stay in range
    return static_cast<int>(it - c.begin());
}

} // namespace saprek
