#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

// Closed-form sample-count certificates for linear least squares under
// zero-mean sub-Gaussian martingale-difference noise.
//
// For a model x = A theta0 + v with |A_ni| <= alpha a.s., M = (1/N)E(A^T A)
// having extreme eigenvalues sigma_min <= sigma_max, and noise whose
// conditional MGF satisfies E(exp(s v_n) | past) <= exp(s^2 delta^2 / 2),
// the certified sample count for P(||theta_hat - theta0||_inf > r) < eps is
//
//   N(r, eps) = max{ n1(r, eps), n_rand(eps) }
//   n1(r, eps)  = (8 alpha^2 delta^2 / (r^2 sigma_min^2)) * log(2p / eps)
//   n_rand(eps) = (4/3) (6 sigma_max + sigma_min)(p alpha^2 + sigma_max)
//                 / sigma_min^2 * log(2p / eps)
//
// valid for every N strictly greater than N(r, eps). Logs are natural.

namespace lsqb {

struct BoundInputs {
    int p = 0;               // parameter dimension
    double alpha = 0.0;      // a.s. bound on design entries
    double delta = 0.0;      // conditional sub-Gaussian parameter of the noise
    double sigma_min = 0.0;  // lambda_min of M
    double sigma_max = 0.0;  // lambda_max of M

    void validate() const {
        if (p < 1) throw std::invalid_argument("BoundInputs: p must be >= 1");
        if (!(alpha > 0.0)) throw std::invalid_argument("BoundInputs: alpha must be > 0");
        if (!(delta > 0.0)) throw std::invalid_argument("BoundInputs: delta must be > 0");
        if (!(sigma_min > 0.0)) throw std::invalid_argument("BoundInputs: sigma_min must be > 0");
        if (!(sigma_max >= sigma_min)) throw std::invalid_argument("BoundInputs: sigma_max must be >= sigma_min");
        // trace(M) <= p * alpha^2 forces this; tiny slack for round-off in derived inputs
        if (sigma_max > p * alpha * alpha * (1.0 + 1e-12))
            throw std::invalid_argument("BoundInputs: sigma_max must be <= p * alpha^2");
    }
};

struct BoundResult {
    double n1 = 0.0;        // noise-concentration term, before ceiling
    double nrand = 0.0;     // design-concentration term, before ceiling
    long long n = 0;        // ceil(max(n1, nrand)); guarantee holds for all N > n
    double log_term = 0.0;  // log(2p / eps)
    bool degenerate = false;  // eps >= 2p: the log term is <= 0, any N certifies
};

namespace detail {

inline void require_positive(double x, const char* name) {
    if (!(x > 0.0)) throw std::invalid_argument(std::string(name) + " must be > 0");
}

}  // namespace detail

inline bool degenerate_eps(const BoundInputs& in, double eps) { return eps >= 2.0 * in.p; }

// log(2p / eps), clamped to 0 in the degenerate regime eps >= 2p.
inline double log_term(const BoundInputs& in, double eps) {
    in.validate();
    detail::require_positive(eps, "eps");
    if (degenerate_eps(in, eps)) return 0.0;
    return std::log(2.0 * in.p / eps);
}

inline double n1(const BoundInputs& in, double r, double eps) {
    detail::require_positive(r, "r");
    const double lt = log_term(in, eps);
    return 8.0 * in.alpha * in.alpha * in.delta * in.delta / (r * r * in.sigma_min * in.sigma_min) * lt;
}

inline double n_rand(const BoundInputs& in, double eps) {
    const double lt = log_term(in, eps);
    return (4.0 / 3.0) * (6.0 * in.sigma_max + in.sigma_min) * (in.p * in.alpha * in.alpha + in.sigma_max) /
           (in.sigma_min * in.sigma_min) * lt;
}

inline BoundResult n_required(const BoundInputs& in, double r, double eps) {
    BoundResult out;
    out.n1 = n1(in, r, eps);
    out.nrand = n_rand(in, eps);
    out.log_term = log_term(in, eps);
    out.degenerate = degenerate_eps(in, eps);
    out.n = static_cast<long long>(std::ceil(std::max(out.n1, out.nrand)));
    return out;
}

// Largest accuracy radius certified by n samples at confidence eps, obtained
// by solving n1(r, eps) = n for r. Infeasible when n < n_rand(eps): the
// design-concentration requirement does not depend on r, so no radius helps.
inline std::optional<double> invert_r(const BoundInputs& in, long long n, double eps) {
    if (n < 1) throw std::invalid_argument("invert_r: n must be >= 1");
    const double lt = log_term(in, eps);
    if (static_cast<double>(n) < n_rand(in, eps)) return std::nullopt;
    return std::sqrt(8.0 * in.alpha * in.alpha * in.delta * in.delta * lt /
                     (static_cast<double>(n) * in.sigma_min * in.sigma_min));
}

// Smallest confidence level certified by n samples at radius r (up to the
// one-sample ceiling slack of n_required).
inline double invert_eps(const BoundInputs& in, long long n, double r) {
    in.validate();
    if (n < 1) throw std::invalid_argument("invert_eps: n must be >= 1");
    detail::require_positive(r, "r");
    const double nd = static_cast<double>(n);
    const double two_p = 2.0 * in.p;
    const double e1 = two_p * std::exp(-nd * r * r * in.sigma_min * in.sigma_min /
                                       (8.0 * in.alpha * in.alpha * in.delta * in.delta));
    const double e2 = two_p * std::exp(-3.0 * nd * in.sigma_min * in.sigma_min /
                                       (4.0 * (6.0 * in.sigma_max + in.sigma_min) *
                                        (in.p * in.alpha * in.alpha + in.sigma_max)));
    return std::max(e1, e2);
}

// Radius at which the two terms cross: n1(r, eps) > n_rand(eps) iff r < r*.
// Independent of eps since both terms share the same log factor.
inline double crossover_r(const BoundInputs& in) {
    in.validate();
    return std::sqrt(6.0 * in.alpha * in.alpha * in.delta * in.delta /
                     ((6.0 * in.sigma_max + in.sigma_min) * (in.p * in.alpha * in.alpha + in.sigma_max)));
}

}  // namespace lsqb
