#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

namespace lsqb {

// 99.5% standard-normal quantile, i.e. the half-width multiplier of a
// two-sided 99% asymptotic band.
inline constexpr double kZ99 = 2.5758293035489004;

struct BinomialCi {
    double low = 0.0;
    double high = 1.0;
};

// Exact (Clopper-Pearson) two-sided binomial confidence interval for the
// success probability given k successes in n trials.
inline BinomialCi clopper_pearson(long long k, long long n, double confidence = 0.99) {
    if (n <= 0 || k < 0 || k > n) throw std::invalid_argument("clopper_pearson: need 0 <= k <= n, n > 0");
    if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("clopper_pearson: confidence in (0,1)");
    const double a = 1.0 - confidence;
    BinomialCi ci;
    const auto kd = static_cast<double>(k);
    const auto nd = static_cast<double>(n);
    ci.low = (k == 0) ? 0.0 : boost::math::ibeta_inv(kd, nd - kd + 1.0, a / 2.0);
    ci.high = (k == n) ? 1.0 : boost::math::ibeta_inv(kd + 1.0, nd - kd, 1.0 - a / 2.0);
    return ci;
}

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty input");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

// Unbiased sample variance.
inline double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("sample_variance: need at least two values");
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

// P(|Z| > q) for standard normal Z.
inline double normal_two_sided_tail(double q) { return std::erfc(q / std::sqrt(2.0)); }

}  // namespace lsqb
