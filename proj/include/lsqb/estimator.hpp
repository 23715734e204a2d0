#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "lsqb/design.hpp"

// Least-squares fit theta_hat = (A^T A)^{-1} A^T x and the per-coordinate
// error decomposition theta_hat - theta0 = ((1/N) A^T A)^{-1} (1/N) A^T v.

namespace lsqb {

// Design-rank violation (assumption A2: rank(A^T A) = p almost surely).
struct RankError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LinearModelInstance {
    DesignMatrix a;
    Eigen::VectorXd theta0;
    Eigen::VectorXd x;
    Eigen::VectorXd v;

    static LinearModelInstance make(DesignMatrix a, Eigen::VectorXd theta0, Eigen::VectorXd v) {
        if (theta0.size() != a.spec.p) throw std::invalid_argument("LinearModelInstance: theta0 must have length p");
        if (v.size() != a.n()) throw std::invalid_argument("LinearModelInstance: v must have length N");
        LinearModelInstance inst{std::move(a), std::move(theta0), {}, std::move(v)};
        inst.x = inst.a.entries * inst.theta0 + inst.v;
        return inst;
    }
};

struct EstimateResult {
    Eigen::VectorXd theta_hat;
    Eigen::VectorXd err;               // theta_hat - theta0
    double err_inf = 0.0;              // ||theta_hat - theta0||_inf
    double gram_lambda_min = 0.0;      // of (1/N) A^T A
    double gram_lambda_max = 0.0;
    Eigen::VectorXd noise_projection;  // (1/N) A^T v
};

// Solves the least-squares problem through a QR factorization of A; the
// Gram matrix is formed only for its spectrum, never inverted.
inline EstimateResult fit(const LinearModelInstance& inst) {
    const GramSpectrum spec = gram_spectrum(inst.a);
    if (!spec.rank_ok)
        throw RankError("fit: design matrix is rank deficient, rank(A^T A) < p violates assumption A2");
    EstimateResult out;
    out.theta_hat = inst.a.entries.householderQr().solve(inst.x);
    out.err = out.theta_hat - inst.theta0;
    out.err_inf = out.err.cwiseAbs().maxCoeff();
    out.gram_lambda_min = spec.lambda_min;
    out.gram_lambda_max = spec.lambda_max;
    out.noise_projection = inst.a.entries.transpose() * inst.v / static_cast<double>(inst.a.n());
    return out;
}

// Event {|err_i| > r}.
inline bool coordinate_error_exceeds(const EstimateResult& result, int i, double r) {
    if (i < 0 || i >= result.err.size()) throw std::out_of_range("coordinate_error_exceeds: coordinate index");
    if (!(r > 0.0)) throw std::invalid_argument("coordinate_error_exceeds: r must be > 0");
    return std::abs(result.err(i)) > r;
}

// Companion diagnostic event {|(1/N) c_i^T v| > r sigma_min / 2}: the
// per-coordinate noise-projection event the union-bound argument controls.
inline bool noise_projection_exceeds(const EstimateResult& result, int i, double r, double sigma_min) {
    if (i < 0 || i >= result.noise_projection.size())
        throw std::out_of_range("noise_projection_exceeds: coordinate index");
    if (!(r > 0.0)) throw std::invalid_argument("noise_projection_exceeds: r must be > 0");
    if (!(sigma_min > 0.0)) throw std::invalid_argument("noise_projection_exceeds: sigma_min must be > 0");
    return std::abs(result.noise_projection(i)) > r * sigma_min / 2.0;
}

}  // namespace lsqb
