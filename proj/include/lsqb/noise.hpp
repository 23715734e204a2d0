#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "lsqb/seed.hpp"
#include "lsqb/stats.hpp"

// Zero-mean sub-Gaussian noise generators with a computed certificate delta
// such that E(exp(s v_n) | past) <= exp(s^2 delta^2 / 2), plus statistical
// checkers for the zero-mean / martingale-difference / sub-Gaussian
// assumptions (A1, A5, A6).
//
// fir_mds models an interfering bounded signal passed through an unknown
// finite impulse response system plus an independent Gaussian floor:
//
//   v_n = sum_{i=0}^{k} j(n-i) H_n(i) + w(n)
//
// with j an i.i.d. +-eta stream (a BPSK signal), H_n(i) i.i.d. Gaussian taps
// with parameter R1 redrawn at each step (a fast-varying unknown system) and
// w i.i.d. Gaussian with parameter R2. The conditional moment generating
// function given the past of (j, w, H) is exactly exp(s^2 delta^2 / 2) with
// delta = sqrt((k+1) eta^2 R1^2 + R2^2), so the process is an adapted
// martingale difference and delta-sub-Gaussian. Holding the taps fixed over
// a whole realization would break both properties along a single stream: the
// lag-autocovariance conditional on the taps is nonzero almost surely.

namespace lsqb {

enum class NoiseKind { gaussian, uniform_bounded, rademacher_scaled, gaussian_mixture, fir_mds, ar1 };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    double sigma = 0.0;               // gaussian; ar1 innovation scale
    double c = 0.0;                   // uniform_bounded / rademacher_scaled
    std::vector<double> weights;      // gaussian_mixture
    std::vector<double> sigmas;       // gaussian_mixture
    int taps = 0;                     // fir_mds: k+1
    double eta = 0.0;                 // fir_mds: bound on the interfering signal
    double r1 = 0.0;                  // fir_mds: sub-Gaussian parameter of the system taps
    double r2 = 0.0;                  // fir_mds: sub-Gaussian parameter of the additive floor
    double phi = 0.0;                 // ar1: correlation (negative control, violates A5)

    static NoiseSpec gaussian(double sigma);
    static NoiseSpec uniform_bounded(double c);
    static NoiseSpec rademacher_scaled(double c);
    static NoiseSpec gaussian_mixture(std::vector<double> weights, std::vector<double> sigmas);
    static NoiseSpec fir_mds(int taps, double eta, double r1, double r2);
    static NoiseSpec ar1(double phi, double sigma);

    void validate() const;
    double delta() const;
};

// Sub-Gaussian certificate for each kind. For ar1 this is the marginal
// certificate only; the process deliberately violates A5.
inline double delta_of(const NoiseSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case NoiseKind::gaussian:
            return spec.sigma;
        case NoiseKind::uniform_bounded:
        case NoiseKind::rademacher_scaled:
            return spec.c;
        case NoiseKind::gaussian_mixture: {
            double m = 0.0;
            for (double s : spec.sigmas) m = std::max(m, s);
            return m;
        }
        case NoiseKind::fir_mds:
            return std::sqrt(static_cast<double>(spec.taps) * spec.eta * spec.eta * spec.r1 * spec.r1 +
                             spec.r2 * spec.r2);
        case NoiseKind::ar1:
            return spec.sigma / std::sqrt(1.0 - spec.phi * spec.phi);
    }
    throw std::logic_error("delta_of: unknown noise kind");
}

inline void NoiseSpec::validate() const {
    auto positive = [](double x, const char* what) {
        if (!(x > 0.0)) throw std::invalid_argument(std::string("NoiseSpec: ") + what + " must be > 0");
    };
    switch (kind) {
        case NoiseKind::gaussian:
            positive(sigma, "sigma");
            break;
        case NoiseKind::uniform_bounded:
        case NoiseKind::rademacher_scaled:
            positive(c, "c");
            break;
        case NoiseKind::gaussian_mixture: {
            if (weights.empty() || weights.size() != sigmas.size())
                throw std::invalid_argument("NoiseSpec: mixture needs matching nonempty weights and sigmas");
            double sum = 0.0;
            for (double w : weights) {
                positive(w, "every mixture weight");
                sum += w;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw std::invalid_argument("NoiseSpec: mixture weights must sum to 1");
            for (double s : sigmas) positive(s, "every mixture sigma");
            break;
        }
        case NoiseKind::fir_mds:
            if (taps < 1) throw std::invalid_argument("NoiseSpec: fir_mds needs taps >= 1");
            if (eta < 0.0) throw std::invalid_argument("NoiseSpec: eta must be >= 0");
            positive(r1, "r1");
            positive(r2, "r2");
            break;
        case NoiseKind::ar1:
            positive(sigma, "sigma");
            if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("NoiseSpec: ar1 needs |phi| < 1");
            break;
    }
}

inline double NoiseSpec::delta() const { return delta_of(*this); }

inline NoiseSpec NoiseSpec::gaussian(double sigma) {
    NoiseSpec s;
    s.kind = NoiseKind::gaussian;
    s.sigma = sigma;
    s.validate();
    return s;
}
inline NoiseSpec NoiseSpec::uniform_bounded(double c) {
    NoiseSpec s;
    s.kind = NoiseKind::uniform_bounded;
    s.c = c;
    s.validate();
    return s;
}
inline NoiseSpec NoiseSpec::rademacher_scaled(double c) {
    NoiseSpec s;
    s.kind = NoiseKind::rademacher_scaled;
    s.c = c;
    s.validate();
    return s;
}
inline NoiseSpec NoiseSpec::gaussian_mixture(std::vector<double> weights, std::vector<double> sigmas) {
    NoiseSpec s;
    s.kind = NoiseKind::gaussian_mixture;
    s.weights = std::move(weights);
    s.sigmas = std::move(sigmas);
    s.validate();
    return s;
}
inline NoiseSpec NoiseSpec::fir_mds(int taps, double eta, double r1, double r2) {
    NoiseSpec s;
    s.kind = NoiseKind::fir_mds;
    s.taps = taps;
    s.eta = eta;
    s.r1 = r1;
    s.r2 = r2;
    s.validate();
    return s;
}
inline NoiseSpec NoiseSpec::ar1(double phi, double sigma) {
    NoiseSpec s;
    s.kind = NoiseKind::ar1;
    s.phi = phi;
    s.sigma = sigma;
    s.validate();
    return s;
}

// i.i.d. kinds only; fir_mds and ar1 carry temporal structure and have their
// own samplers.
inline std::vector<double> sample_iid(const NoiseSpec& spec, long n, std::uint64_t seed) {
    spec.validate();
    if (n < 1) throw std::invalid_argument("noise sample: N must be >= 1");
    if (spec.kind == NoiseKind::fir_mds)
        throw std::invalid_argument("sample_iid: fir_mds is not i.i.d., use sample_mds");
    if (spec.kind == NoiseKind::ar1)
        throw std::invalid_argument("sample_iid: ar1 is not i.i.d., use sample_ar1");
    std::vector<double> v(static_cast<std::size_t>(n));
    std::mt19937_64 rng(derive_seed(seed));
    switch (spec.kind) {
        case NoiseKind::gaussian: {
            std::normal_distribution<double> g(0.0, spec.sigma);
            for (auto& x : v) x = g(rng);
            break;
        }
        case NoiseKind::uniform_bounded: {
            std::uniform_real_distribution<double> u(-spec.c, spec.c);
            for (auto& x : v) x = u(rng);
            break;
        }
        case NoiseKind::rademacher_scaled:
            for (auto& x : v) x = (rng() & 1ull) ? spec.c : -spec.c;
            break;
        case NoiseKind::gaussian_mixture: {
            std::discrete_distribution<int> pick(spec.weights.begin(), spec.weights.end());
            std::normal_distribution<double> g(0.0, 1.0);
            for (auto& x : v) x = spec.sigmas[static_cast<std::size_t>(pick(rng))] * g(rng);
            break;
        }
        default:
            throw std::logic_error("sample_iid: unreachable");
    }
    return v;
}

inline std::vector<double> sample_mds(const NoiseSpec& spec, long n, std::uint64_t seed) {
    spec.validate();
    if (spec.kind != NoiseKind::fir_mds) throw std::invalid_argument("sample_mds: spec kind must be fir_mds");
    if (spec.taps >= n) throw std::invalid_argument("sample_mds: need N > taps");
    const int k = spec.taps - 1;
    std::mt19937_64 rng(derive_seed(seed));
    // BPSK stream with k steps of prehistory so the process is stationary
    // from the first output sample.
    std::vector<double> bpsk(static_cast<std::size_t>(n + k));
    for (auto& b : bpsk) b = (rng() & 1ull) ? 1.0 : -1.0;
    std::normal_distribution<double> tap(0.0, spec.r1);
    std::normal_distribution<double> floor(0.0, spec.r2);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (long t = 0; t < n; ++t) {
        double acc = 0.0;
        for (int i = 0; i <= k; ++i) acc += bpsk[static_cast<std::size_t>(t + k - i)] * tap(rng);
        v[static_cast<std::size_t>(t)] = spec.eta * acc + floor(rng);
    }
    return v;
}

inline std::vector<double> sample_ar1(const NoiseSpec& spec, long n, std::uint64_t seed) {
    spec.validate();
    if (spec.kind != NoiseKind::ar1) throw std::invalid_argument("sample_ar1: spec kind must be ar1");
    if (n < 1) throw std::invalid_argument("noise sample: N must be >= 1");
    std::mt19937_64 rng(derive_seed(seed));
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(n));
    // stationary start
    v[0] = spec.sigma / std::sqrt(1.0 - spec.phi * spec.phi) * g(rng);
    for (long t = 1; t < n; ++t)
        v[static_cast<std::size_t>(t)] = spec.phi * v[static_cast<std::size_t>(t - 1)] + spec.sigma * g(rng);
    return v;
}

// Dispatch on kind.
inline std::vector<double> sample_noise(const NoiseSpec& spec, long n, std::uint64_t seed) {
    switch (spec.kind) {
        case NoiseKind::fir_mds:
            return sample_mds(spec, n, seed);
        case NoiseKind::ar1:
            return sample_ar1(spec, n, seed);
        default:
            return sample_iid(spec, n, seed);
    }
}

// ---------------------------------------------------------------------------
// Checkers

struct SubGaussianPoint {
    double s = 0.0;
    double log_mgf = 0.0;  // log of the empirical MGF at s
    double bound = 0.0;    // s^2 delta^2 / 2
    double slack = 0.0;    // CI half-width of the empirical log-MGF
    bool ok = false;
};

struct SubGaussianReport {
    std::vector<SubGaussianPoint> points;
    double max_violation = 0.0;  // max over grid of log_mgf - bound - slack
    bool pass = false;
};

// Empirical-MGF certificate check: pass iff log (1/N) sum exp(s v_i) stays
// below s^2 delta^2 / 2 plus a 3-standard-error slack at every grid point.
inline SubGaussianReport check_subgaussian(std::span<const double> values, double delta,
                                           std::span<const double> s_grid) {
    if (values.size() < 2) throw std::invalid_argument("check_subgaussian: need at least two samples");
    if (s_grid.empty()) throw std::invalid_argument("check_subgaussian: empty s grid");
    if (!(delta > 0.0)) throw std::invalid_argument("check_subgaussian: delta must be > 0");
    SubGaussianReport rep;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(values.size());
    std::vector<double> e(values.size());
    for (double s : s_grid) {
        if (!std::isfinite(s)) throw std::invalid_argument("check_subgaussian: s grid must be finite");
        for (std::size_t i = 0; i < values.size(); ++i) e[i] = std::exp(s * values[i]);
        const double m = mean(e);
        const double se = std::sqrt(sample_variance(e) / n);
        SubGaussianPoint pt;
        pt.s = s;
        pt.log_mgf = std::log(m);
        pt.bound = s * s * delta * delta / 2.0;
        pt.slack = std::log(m + 3.0 * se) - std::log(m);
        pt.ok = pt.log_mgf <= pt.bound + pt.slack;
        rep.max_violation = std::max(rep.max_violation, pt.log_mgf - pt.bound - pt.slack);
        rep.points.push_back(pt);
    }
    rep.pass = rep.max_violation <= 0.0;
    return rep;
}

struct MdsLagStat {
    int lag = 0;
    double value = 0.0;  // normalized autocovariance, or regression coefficient
    double band = 0.0;   // 99% half-width; ok iff |value| <= band
    bool ok = false;
};

struct MdsReport {
    std::vector<MdsLagStat> lag_stats;
    std::vector<MdsLagStat> regression_coeffs;
    bool pass = false;
};

// Martingale-difference diagnostic: normalized sample autocovariances at lags
// 1..max_lag plus the coefficients of a regression of v_n on its max_lag
// predecessors, each compared against its asymptotic 99% band.
inline MdsReport check_mds(std::span<const double> values, int max_lag) {
    const long n = static_cast<long>(values.size());
    if (max_lag < 1) throw std::invalid_argument("check_mds: max_lag must be >= 1");
    if (max_lag >= n / 10) throw std::invalid_argument("check_mds: max_lag must be < N/10");
    const double m = mean(values);
    std::vector<double> x(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) x[i] = values[i] - m;

    double c0 = 0.0;
    for (double xv : x) c0 += xv * xv;
    c0 /= static_cast<double>(n);
    if (!(c0 > 0.0)) throw std::invalid_argument("check_mds: input has zero variance");

    MdsReport rep;
    rep.pass = true;
    const double band = kZ99 / std::sqrt(static_cast<double>(n));
    for (int lag = 1; lag <= max_lag; ++lag) {
        double c = 0.0;
        for (long t = lag; t < n; ++t)
            c += x[static_cast<std::size_t>(t)] * x[static_cast<std::size_t>(t - lag)];
        c /= static_cast<double>(n);
        MdsLagStat stat{lag, c / c0, band, std::abs(c / c0) <= band};
        rep.pass = rep.pass && stat.ok;
        rep.lag_stats.push_back(stat);
    }

    const long rows = n - max_lag;
    Eigen::MatrixXd pred(rows, max_lag);
    Eigen::VectorXd y(rows);
    for (long t = max_lag; t < n; ++t) {
        y(t - max_lag) = x[static_cast<std::size_t>(t)];
        for (int j = 1; j <= max_lag; ++j) pred(t - max_lag, j - 1) = x[static_cast<std::size_t>(t - j)];
    }
    const Eigen::MatrixXd xtx = pred.transpose() * pred;
    const Eigen::VectorXd beta = xtx.ldlt().solve(pred.transpose() * y);
    const double rss = (y - pred * beta).squaredNorm();
    const double s2 = rss / static_cast<double>(rows - max_lag);
    const Eigen::MatrixXd xtx_inv = xtx.ldlt().solve(Eigen::MatrixXd::Identity(max_lag, max_lag));
    for (int j = 0; j < max_lag; ++j) {
        const double se = std::sqrt(s2 * xtx_inv(j, j));
        MdsLagStat stat{j + 1, beta(j), kZ99 * se, std::abs(beta(j)) <= kZ99 * se};
        rep.pass = rep.pass && stat.ok;
        rep.regression_coeffs.push_back(stat);
    }
    return rep;
}

}  // namespace lsqb
