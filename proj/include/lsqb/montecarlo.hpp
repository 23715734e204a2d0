#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "lsqb/bounds.hpp"
#include "lsqb/design.hpp"
#include "lsqb/estimator.hpp"
#include "lsqb/noise.hpp"
#include "lsqb/seed.hpp"
#include "lsqb/stats.hpp"

// Reproducible Monte-Carlo harness: tail-probability estimation with exact
// binomial confidence intervals, empirical sample-count search, and the
// eigenvalue-concentration / per-coordinate diagnostics behind the certified
// bounds. Trials are independent tasks seeded by counter derivation, so
// results are identical for any thread count and any scheduling order;
// aggregation is integer exceedance counting only.

namespace lsqb {

struct ExperimentConfig {
    DesignSpec design;
    NoiseSpec noise;
    Eigen::VectorXd theta0;
    double epsilon = 0.2;
    std::vector<double> r_grid;
    long long trials = 2000;
    std::uint64_t master_seed = 0;

    void validate() const {
        design.validate();
        noise.validate();
        if (theta0.size() != design.p) throw std::invalid_argument("ExperimentConfig: theta0 must have length p");
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("ExperimentConfig: epsilon must be in (0,1)");
        if (r_grid.empty()) throw std::invalid_argument("ExperimentConfig: r_grid must be nonempty");
        double prev = 0.0;
        for (double r : r_grid) {
            if (!(r > prev)) throw std::invalid_argument("ExperimentConfig: r_grid must be strictly ascending and positive");
            prev = r;
        }
        if (trials < 100) throw std::invalid_argument("ExperimentConfig: trials must be >= 100");
    }
};

struct TailEstimate {
    double p_hat = 0.0;
    long long exceed_count = 0;
    long long trials = 0;
    double ci_low = 0.0;   // exact binomial 99% interval
    double ci_high = 1.0;
    long long n = 0;
    double r = 0.0;
};

struct SweepRow {
    double r = 0.0;
    double n_theory_n1 = 0.0;
    double n_theory_nrand = 0.0;
    long long n_theory = 0;
    long long n_empirical = -1;  // -1: search cap reached
    double p_hat_at_n_theory = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
};

// BoundInputs implied by an experiment: alpha and p from the design, delta
// from the noise certificate, sigma_min/max from the spectrum of M.
inline BoundInputs bound_inputs_from(const ExperimentConfig& config) {
    config.validate();
    const GramSpectrum m = detail::spectrum_of_gram(expected_gram(config.design));
    BoundInputs in{config.design.p, config.design.alpha, delta_of(config.noise), m.lambda_min, m.lambda_max};
    in.validate();
    return in;
}

namespace detail {

inline void parallel_for(long long total, int threads, const std::function<void(long long)>& body) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (total < threads) threads = static_cast<int>(total);
    if (threads <= 1) {
        for (long long i = 0; i < total; ++i) body(i);
        return;
    }
    std::atomic<long long> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const long long i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= total) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Smallest N the configured generators accept.
inline long long min_valid_n(const ExperimentConfig& config) {
    long long n = config.design.p;
    if (config.noise.kind == NoiseKind::fir_mds) n = std::max<long long>(n, config.noise.taps + 1);
    if (config.design.kind == DesignKind::fixed_block && n % config.design.p != 0)
        n += config.design.p - n % config.design.p;
    return n;
}

inline long long next_valid_n(const ExperimentConfig& config, long long n) {
    const long long lo = min_valid_n(config);
    if (n < lo) return lo;
    if (config.design.kind == DesignKind::fixed_block && n % config.design.p != 0)
        n += config.design.p - n % config.design.p;
    return n;
}

inline double run_trial_with_root(const ExperimentConfig& config, long long n, long long trial_index,
                                  std::uint64_t seed_root) {
    const std::uint64_t noise_seed = derive_seed(seed_root, SeedPurpose::trial_noise,
                                                 static_cast<std::uint64_t>(n),
                                                 static_cast<std::uint64_t>(trial_index));
    for (std::uint64_t attempt = 0; attempt <= 100; ++attempt) {
        const std::uint64_t design_seed = derive_seed(seed_root, SeedPurpose::trial_design,
                                                      static_cast<std::uint64_t>(n),
                                                      static_cast<std::uint64_t>(trial_index), attempt);
        DesignMatrix a = sample(config.design, n, design_seed);
        if (!gram_spectrum(a).rank_ok) continue;
        Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(
            sample_noise(config.noise, n, noise_seed).data(), n);
        return fit(LinearModelInstance::make(std::move(a), config.theta0, std::move(v))).err_inf;
    }
    throw RankError("run_trial: design stayed rank deficient after 100 resamples (assumption A2)");
}

inline TailEstimate tail_with_root(const ExperimentConfig& config, long long n, double r, long long trials,
                                   int threads, std::uint64_t seed_root) {
    std::vector<char> exceed(static_cast<std::size_t>(trials), 0);
    parallel_for(trials, threads, [&](long long i) {
        exceed[static_cast<std::size_t>(i)] = run_trial_with_root(config, n, i, seed_root) > r ? 1 : 0;
    });
    TailEstimate est;
    est.trials = trials;
    est.n = n;
    est.r = r;
    for (char e : exceed) est.exceed_count += e;
    est.p_hat = static_cast<double>(est.exceed_count) / static_cast<double>(trials);
    const BinomialCi ci = clopper_pearson(est.exceed_count, trials);
    est.ci_low = ci.low;
    est.ci_high = ci.high;
    return est;
}

}  // namespace detail

// One realization of the model at the given sample count: draws A and v from
// seeds derived from (master_seed, N, trial_index), fits, and returns the
// sup-norm estimation error. Rank-deficient design draws are resampled with a
// derived sub-seed.
inline double run_trial(const ExperimentConfig& config, long long n, long long trial_index) {
    config.validate();
    if (n < detail::min_valid_n(config)) throw std::invalid_argument("run_trial: N below the minimum for this config");
    return detail::run_trial_with_root(config, n, trial_index, config.master_seed);
}

// Monte-Carlo estimate of P(||theta_hat - theta0||_inf > r) at sample count N.
inline TailEstimate tail_probability(const ExperimentConfig& config, long long n, double r, long long trials,
                                     int threads = 0) {
    config.validate();
    if (trials < 100) throw std::invalid_argument("tail_probability: trials must be >= 100");
    if (!(r >= 0.0)) throw std::invalid_argument("tail_probability: r must be >= 0");
    if (n < detail::min_valid_n(config)) throw std::invalid_argument("tail_probability: N below the minimum for this config");
    return detail::tail_with_root(config, n, r, trials, threads, config.master_seed);
}

// Smallest N on a geometric-then-bisection grid whose 99% upper confidence
// limit of the tail probability is below epsilon; the winner is re-validated
// with a fresh seed stream. Bisection leans on the tail being monotone in N,
// which holds in expectation for these ensembles; the validation pass guards
// the conclusion. Returns nullopt when the cap is exhausted.
inline std::optional<long long> find_empirical_n(const ExperimentConfig& config, double r, double epsilon,
                                                 long long trials, int threads = 0,
                                                 long long n_cap = 10'000'000) {
    config.validate();
    if (trials < 100) throw std::invalid_argument("find_empirical_n: trials must be >= 100");
    if (!(r > 0.0)) throw std::invalid_argument("find_empirical_n: r must be > 0");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("find_empirical_n: epsilon must be in (0,1)");

    auto accept = [&](long long n) {
        return detail::tail_with_root(config, n, r, trials, threads, config.master_seed).ci_high <= epsilon;
    };
    auto validate = [&](long long n) {
        const std::uint64_t fresh = derive_seed(config.master_seed, SeedPurpose::validation);
        return detail::tail_with_root(config, n, r, trials, threads, fresh).ci_high <= epsilon;
    };

    long long candidate = detail::min_valid_n(config);
    if (!accept(candidate)) {
        long long lo = candidate;  // highest rejected N
        long long hi = -1;
        for (long long n = lo;;) {
            n = detail::next_valid_n(config, static_cast<long long>(std::ceil(static_cast<double>(n) * 1.5)));
            if (n <= lo) n = detail::next_valid_n(config, lo + 1);
            if (n > n_cap) return std::nullopt;
            if (accept(n)) {
                hi = n;
                break;
            }
            lo = n;
        }
        while (true) {
            const long long mid = detail::next_valid_n(config, lo + (hi - lo) / 2);
            if (mid <= lo || mid >= hi) break;
            if (accept(mid))
                hi = mid;
            else
                lo = mid;
        }
        candidate = hi;
    }
    while (candidate <= n_cap) {
        if (accept(candidate) && validate(candidate)) return candidate;
        candidate = detail::next_valid_n(config, candidate + 1);
    }
    return std::nullopt;
}

// One row per configured radius: certified sample counts, the empirically
// sufficient sample count, and the observed tail at the certified count.
inline std::vector<SweepRow> figure1_sweep(const ExperimentConfig& config, int threads = 0) {
    config.validate();
    const BoundInputs inputs = bound_inputs_from(config);
    std::vector<SweepRow> rows;
    rows.reserve(config.r_grid.size());
    for (double r : config.r_grid) {
        const BoundResult bound = n_required(inputs, r, config.epsilon);
        SweepRow row;
        row.r = r;
        row.n_theory_n1 = bound.n1;
        row.n_theory_nrand = bound.nrand;
        row.n_theory = bound.n;
        row.n_empirical = find_empirical_n(config, r, config.epsilon, config.trials, threads).value_or(-1);
        const long long n_eval = detail::next_valid_n(config, bound.n);
        const TailEstimate tail = tail_probability(config, n_eval, r, config.trials, threads);
        row.p_hat_at_n_theory = tail.p_hat;
        row.ci_low = tail.ci_low;
        row.ci_high = tail.ci_high;
        rows.push_back(row);
    }
    return rows;
}

struct GramConcentrationReport {
    long long n_used = 0;  // certified design-concentration sample count at eps_prime
    double eps_prime = 0.0;
    long long trials = 0;
    long long event_count = 0;  // trials with lambda_min((1/N) A^T A) <= sigma_min / 2
    double frequency = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    bool pass = false;
};

// Empirical check of the design-concentration certificate: at
// N = ceil((4/3)(6 sigma_max + sigma_min)(p alpha^2 + sigma_max) / sigma_min^2
// * log(p / eps')), the event that the sample Gram's smallest eigenvalue
// drops to half of sigma_min should occur with probability at most eps'.
inline GramConcentrationReport gram_concentration_diagnostic(const DesignSpec& design, double eps_prime,
                                                             long long trials, std::uint64_t master_seed,
                                                             int threads = 0, long long n_override = 0) {
    design.validate();
    if (!(eps_prime > 0.0 && eps_prime < 1.0))
        throw std::invalid_argument("gram_concentration_diagnostic: eps_prime must be in (0,1)");
    if (trials < 100) throw std::invalid_argument("gram_concentration_diagnostic: trials must be >= 100");
    const GramSpectrum m = detail::spectrum_of_gram(expected_gram(design));
    const double sigma_min = m.lambda_min;
    const double sigma_max = m.lambda_max;
    const double n_exact = (4.0 / 3.0) * (6.0 * sigma_max + sigma_min) *
                           (design.p * design.alpha * design.alpha + sigma_max) / (sigma_min * sigma_min) *
                           std::log(design.p / eps_prime);
    long long n = n_override > 0 ? n_override
                                 : std::max<long long>(design.p, static_cast<long long>(std::ceil(n_exact)));
    if (design.kind == DesignKind::fixed_block && n % design.p != 0) n += design.p - n % design.p;

    GramConcentrationReport rep;
    rep.n_used = n;
    rep.eps_prime = eps_prime;
    rep.trials = trials;
    std::vector<char> hit(static_cast<std::size_t>(trials), 0);
    detail::parallel_for(trials, threads, [&](long long i) {
        const std::uint64_t seed = derive_seed(master_seed, SeedPurpose::gram_diag, static_cast<std::uint64_t>(i));
        const GramSpectrum g = gram_spectrum(sample(design, n, seed));
        hit[static_cast<std::size_t>(i)] = g.lambda_min <= sigma_min / 2.0 ? 1 : 0;
    });
    for (char h : hit) rep.event_count += h;
    rep.frequency = static_cast<double>(rep.event_count) / static_cast<double>(trials);
    const BinomialCi ci = clopper_pearson(rep.event_count, trials);
    rep.ci_low = ci.low;
    rep.ci_high = ci.high;
    rep.pass = rep.ci_low <= eps_prime;
    return rep;
}

struct CoordinateBoundReport {
    struct Coordinate {
        long long error_count = 0;       // |err_i| > r
        long long projection_count = 0;  // |(1/N) c_i^T v| > r * lambda_min((1/N) A^T A)
        double error_p = 0.0;
        double projection_p = 0.0;
        BinomialCi error_ci;
        BinomialCi projection_ci;
    };
    long long n = 0;
    double r = 0.0;
    long long trials = 0;
    std::vector<Coordinate> coords;
};

// Side-by-side empirical frequencies of the per-coordinate error event and
// the noise-projection event that dominates it in the union-bound argument.
// Reported without a hard assertion; in the scalar case the two events
// coincide exactly.
inline CoordinateBoundReport coordinate_bound_diagnostic(const ExperimentConfig& config, long long n, double r,
                                                         long long trials, int threads = 0) {
    config.validate();
    if (trials < 100) throw std::invalid_argument("coordinate_bound_diagnostic: trials must be >= 100");
    if (!(r > 0.0)) throw std::invalid_argument("coordinate_bound_diagnostic: r must be > 0");
    if (n < detail::min_valid_n(config)) throw std::invalid_argument("coordinate_bound_diagnostic: N below the minimum");
    const int p = config.design.p;
    std::vector<char> err_hit(static_cast<std::size_t>(trials * p), 0);
    std::vector<char> proj_hit(static_cast<std::size_t>(trials * p), 0);
    const std::uint64_t root = derive_seed(config.master_seed, SeedPurpose::coord_diag);
    detail::parallel_for(trials, threads, [&](long long i) {
        const std::uint64_t noise_seed = derive_seed(root, SeedPurpose::trial_noise, static_cast<std::uint64_t>(n),
                                                     static_cast<std::uint64_t>(i));
        for (std::uint64_t attempt = 0; attempt <= 100; ++attempt) {
            const std::uint64_t design_seed = derive_seed(root, SeedPurpose::trial_design,
                                                          static_cast<std::uint64_t>(n),
                                                          static_cast<std::uint64_t>(i), attempt);
            DesignMatrix a = sample(config.design, n, design_seed);
            if (!gram_spectrum(a).rank_ok) continue;
            Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(
                sample_noise(config.noise, n, noise_seed).data(), n);
            const EstimateResult res = fit(LinearModelInstance::make(std::move(a), config.theta0, std::move(v)));
            for (int j = 0; j < p; ++j) {
                err_hit[static_cast<std::size_t>(i * p + j)] = std::abs(res.err(j)) > r ? 1 : 0;
                proj_hit[static_cast<std::size_t>(i * p + j)] =
                    std::abs(res.noise_projection(j)) > r * res.gram_lambda_min ? 1 : 0;
            }
            return;
        }
        throw RankError("coordinate_bound_diagnostic: design stayed rank deficient after 100 resamples");
    });
    CoordinateBoundReport rep;
    rep.n = n;
    rep.r = r;
    rep.trials = trials;
    rep.coords.resize(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
        auto& c = rep.coords[static_cast<std::size_t>(j)];
        for (long long i = 0; i < trials; ++i) {
            c.error_count += err_hit[static_cast<std::size_t>(i * p + j)];
            c.projection_count += proj_hit[static_cast<std::size_t>(i * p + j)];
        }
        c.error_p = static_cast<double>(c.error_count) / static_cast<double>(trials);
        c.projection_p = static_cast<double>(c.projection_count) / static_cast<double>(trials);
        c.error_ci = clopper_pearson(c.error_count, trials);
        c.projection_ci = clopper_pearson(c.projection_count, trials);
    }
    return rep;
}

}  // namespace lsqb
