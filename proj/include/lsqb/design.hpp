#pragma once

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "lsqb/seed.hpp"

// Bounded-element random design ensembles with analytically known
// M = (1/N) E(A^T A). Every ensemble guarantees |A_ni| <= alpha almost
// surely and an M that does not depend on N.

namespace lsqb {

enum class DesignKind { rademacher, uniform, fixed_block };

struct DesignSpec {
    DesignKind kind = DesignKind::rademacher;
    int p = 0;
    double alpha = 0.0;
    Eigen::MatrixXd block;  // fixed_block only: p x p block repeated row-wise

    static DesignSpec rademacher(int p, double alpha) {
        DesignSpec s{DesignKind::rademacher, p, alpha, {}};
        s.validate();
        return s;
    }
    static DesignSpec uniform(int p, double alpha) {
        DesignSpec s{DesignKind::uniform, p, alpha, {}};
        s.validate();
        return s;
    }
    static DesignSpec fixed_block(Eigen::MatrixXd b) {
        if (b.rows() == 0 || b.rows() != b.cols())
            throw std::invalid_argument("fixed_block: block must be square and nonempty");
        DesignSpec s{DesignKind::fixed_block, static_cast<int>(b.cols()),
                     b.cwiseAbs().maxCoeff(), std::move(b)};
        s.validate();
        return s;
    }

    void validate() const {
        if (p < 1) throw std::invalid_argument("DesignSpec: p must be >= 1");
        if (!(alpha > 0.0)) throw std::invalid_argument("DesignSpec: alpha must be > 0");
        if (kind == DesignKind::fixed_block && (block.rows() != p || block.cols() != p))
            throw std::invalid_argument("DesignSpec: fixed_block needs a p x p block");
    }
};

struct DesignMatrix {
    Eigen::MatrixXd entries;  // N x p
    DesignSpec spec;

    long n() const { return entries.rows(); }
};

// M = (1/N) E(A^T A), exact per ensemble.
inline Eigen::MatrixXd expected_gram(const DesignSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case DesignKind::rademacher:
            return spec.alpha * spec.alpha * Eigen::MatrixXd::Identity(spec.p, spec.p);
        case DesignKind::uniform:
            return spec.alpha * spec.alpha / 3.0 * Eigen::MatrixXd::Identity(spec.p, spec.p);
        case DesignKind::fixed_block:
            return spec.block.transpose() * spec.block / static_cast<double>(spec.p);
    }
    throw std::logic_error("expected_gram: unknown design kind");
}

inline DesignMatrix sample(const DesignSpec& spec, long n, std::uint64_t seed) {
    spec.validate();
    if (n < spec.p) throw std::invalid_argument("design sample: N < p cannot satisfy rank(A^T A) = p (assumption A2)");
    DesignMatrix out{Eigen::MatrixXd(n, spec.p), spec};
    std::mt19937_64 rng(derive_seed(seed));
    switch (spec.kind) {
        case DesignKind::rademacher:
            for (long i = 0; i < n; ++i)
                for (int j = 0; j < spec.p; ++j)
                    out.entries(i, j) = (rng() & 1ull) ? spec.alpha : -spec.alpha;
            break;
        case DesignKind::uniform: {
            std::uniform_real_distribution<double> u(-spec.alpha, spec.alpha);
            for (long i = 0; i < n; ++i)
                for (int j = 0; j < spec.p; ++j) out.entries(i, j) = u(rng);
            break;
        }
        case DesignKind::fixed_block: {
            if (n % spec.p != 0)
                throw std::invalid_argument("design sample: fixed_block requires N to be a multiple of p");
            for (long i = 0; i < n; ++i) out.entries.row(i) = spec.block.row(i % spec.p);
            break;
        }
    }
    return out;
}

struct GramSpectrum {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    bool rank_ok = false;
};

// Closed-form eigenvalues of a symmetric 2x2 matrix, kept as an independent
// route against the general solver.
inline std::array<double, 2> sym2x2_eigenvalues(double a, double b, double d) {
    const double tr = a + d;
    const double disc = std::sqrt((a - d) * (a - d) + 4.0 * b * b);
    return {(tr - disc) / 2.0, (tr + disc) / 2.0};
}

namespace detail {

inline GramSpectrum spectrum_of_gram(const Eigen::MatrixXd& gram) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    GramSpectrum s;
    s.lambda_min = es.eigenvalues().minCoeff();
    s.lambda_max = es.eigenvalues().maxCoeff();
    // relative tolerance; Gram matrices here are small and well scaled
    s.rank_ok = s.lambda_max > 0.0 && s.lambda_min > 1e-10 * s.lambda_max;
    return s;
}

}  // namespace detail

// Extreme eigenvalues of the sample Gram (1/N) A^T A. Rank failure is a
// reported state, not an error.
inline GramSpectrum gram_spectrum(const DesignMatrix& a) {
    const Eigen::MatrixXd gram =
        a.entries.transpose() * a.entries / static_cast<double>(a.n());
    return detail::spectrum_of_gram(gram);
}

}  // namespace lsqb
