#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "lsqb/design.hpp"

using lsqb::DesignKind;
using lsqb::DesignMatrix;
using lsqb::DesignSpec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("expected gram per ensemble") {
    const Eigen::MatrixXd m_rad = lsqb::expected_gram(DesignSpec::rademacher(2, std::sqrt(10.0)));
    CHECK(m_rad.isApprox(10.0 * Eigen::MatrixXd::Identity(2, 2), 1e-15));

    const Eigen::MatrixXd m_uni = lsqb::expected_gram(DesignSpec::uniform(3, 1.0));
    CHECK(m_uni.isApprox(Eigen::MatrixXd::Identity(3, 3) / 3.0, 1e-15));

    // repeating a p x p block B gives A^T A = (N/p) B^T B, so M = B^T B / p
    const Eigen::MatrixXd m_id = lsqb::expected_gram(DesignSpec::fixed_block(Eigen::MatrixXd::Identity(2, 2)));
    CHECK(m_id.isApprox(0.5 * Eigen::MatrixXd::Identity(2, 2), 1e-15));
    const Eigen::MatrixXd m_scaled =
        lsqb::expected_gram(DesignSpec::fixed_block(std::sqrt(2.0) * Eigen::MatrixXd::Identity(2, 2)));
    CHECK(m_scaled.isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-15));
}

TEST_CASE("sampled entries respect the almost-sure bound") {
    const double alpha = std::sqrt(10.0);
    const DesignMatrix rad = lsqb::sample(DesignSpec::rademacher(2, alpha), 500, 1);
    for (long i = 0; i < rad.entries.rows(); ++i)
        for (long j = 0; j < rad.entries.cols(); ++j)
            CHECK(std::abs(rad.entries(i, j)) == alpha);

    const DesignMatrix uni = lsqb::sample(DesignSpec::uniform(3, 0.7), 500, 2);
    CHECK(uni.entries.cwiseAbs().maxCoeff() <= 0.7);
}

TEST_CASE("sampling is deterministic in the seed") {
    const DesignSpec spec = DesignSpec::uniform(4, 1.0);
    const DesignMatrix a = lsqb::sample(spec, 200, 99);
    const DesignMatrix b = lsqb::sample(spec, 200, 99);
    CHECK((a.entries.array() == b.entries.array()).all());
    const DesignMatrix c = lsqb::sample(spec, 200, 100);
    CHECK_FALSE((a.entries.array() == c.entries.array()).all());
}

TEST_CASE("sample rejects invalid shapes") {
    CHECK_THROWS_AS(lsqb::sample(DesignSpec::rademacher(3, 1.0), 2, 0), std::invalid_argument);
    const DesignSpec block = DesignSpec::fixed_block(Eigen::MatrixXd::Identity(2, 2));
    CHECK_THROWS_AS(lsqb::sample(block, 5, 0), std::invalid_argument);  // not a multiple of p
    CHECK_NOTHROW(lsqb::sample(block, 6, 0));
}

TEST_CASE("gram spectrum on known matrices") {
    // block [[2,1],[0,sqrt(3)]] has (1/2) B^T B = [[2,1],[1,2]], eigenvalues 1 and 3
    Eigen::MatrixXd b(2, 2);
    b << 2.0, 1.0, 0.0, std::sqrt(3.0);
    const auto spec = lsqb::gram_spectrum(lsqb::sample(DesignSpec::fixed_block(b), 2, 0));
    CHECK_THAT(spec.lambda_min, WithinRel(1.0, 1e-12));
    CHECK_THAT(spec.lambda_max, WithinRel(3.0, 1e-12));
    CHECK(spec.rank_ok);

    // A^T A = N I, so the normalized gram is the identity
    const auto id = lsqb::gram_spectrum(
        lsqb::sample(DesignSpec::fixed_block(std::sqrt(2.0) * Eigen::MatrixXd::Identity(2, 2)), 4, 0));
    CHECK_THAT(id.lambda_min, WithinRel(1.0, 1e-12));
    CHECK_THAT(id.lambda_max, WithinRel(1.0, 1e-12));
    CHECK(id.rank_ok);

    // duplicated column: rank deficiency is reported, not thrown
    Eigen::MatrixXd dup(2, 2);
    dup << 1.0, 1.0, 1.0, 1.0;
    const auto bad = lsqb::gram_spectrum(lsqb::sample(DesignSpec::fixed_block(dup), 4, 0));
    CHECK_THAT(bad.lambda_min, WithinAbs(0.0, 1e-12));
    CHECK_FALSE(bad.rank_ok);

    // eigenvalues of a diagonal gram are exactly its diagonal
    Eigen::MatrixXd diag = Eigen::Vector2d(2.0, 5.0).asDiagonal();
    const auto d = lsqb::gram_spectrum(lsqb::sample(DesignSpec::fixed_block(diag), 2, 0));
    CHECK(d.lambda_min == 2.0);
    CHECK(d.lambda_max == 12.5);  // (1/2) diag(4, 25)
}

TEST_CASE("closed-form 2x2 eigenvalues agree with the general solver") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 300; ++i) {
        // random PSD 2x2 gram from a random 2x2 factor
        Eigen::MatrixXd f(2, 2);
        f << u(rng), u(rng), u(rng), u(rng);
        const Eigen::MatrixXd g = f.transpose() * f;
        const auto closed = lsqb::sym2x2_eigenvalues(g(0, 0), g(0, 1), g(1, 1));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
        const double scale = std::max(1.0, std::abs(closed[1]));
        CHECK_THAT(closed[0], WithinAbs(es.eigenvalues()(0), 1e-12 * scale));
        CHECK_THAT(closed[1], WithinAbs(es.eigenvalues()(1), 1e-12 * scale));
    }
}

TEST_CASE("spectrum ordering and trace bound on random realizations") {
    for (auto spec : {DesignSpec::rademacher(3, 1.3), DesignSpec::uniform(2, 2.0)}) {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const auto s = lsqb::gram_spectrum(lsqb::sample(spec, 40, seed));
            CHECK(s.lambda_min >= -1e-12);
            CHECK(s.lambda_min <= s.lambda_max);
            CHECK(s.lambda_max <= spec.p * spec.alpha * spec.alpha * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("sample gram converges to M entrywise") {
    // oracle: at N = 1e5 the entrywise deviation stays below 0.05 alpha^2 in
    // at least 99 of 100 seeds
    for (auto spec : {DesignSpec::rademacher(2, std::sqrt(10.0)), DesignSpec::uniform(2, 1.0)}) {
        const Eigen::MatrixXd m = lsqb::expected_gram(spec);
        const long n = 100000;
        int ok = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const DesignMatrix a = lsqb::sample(spec, n, seed);
            const Eigen::MatrixXd gram = a.entries.transpose() * a.entries / static_cast<double>(n);
            if ((gram - m).cwiseAbs().maxCoeff() < 0.05 * spec.alpha * spec.alpha) ++ok;
        }
        CHECK(ok >= 99);
    }
}

TEST_CASE("design spec validation") {
    CHECK_THROWS_AS(DesignSpec::rademacher(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(DesignSpec::uniform(2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(DesignSpec::fixed_block(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
    const DesignSpec block = DesignSpec::fixed_block(2.0 * Eigen::MatrixXd::Identity(2, 2));
    CHECK(block.alpha == 2.0);  // derived from the largest block entry
    CHECK(block.p == 2);
}
