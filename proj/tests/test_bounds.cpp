#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "lsqb/bounds.hpp"

using lsqb::BoundInputs;
using lsqb::BoundResult;
using Catch::Matchers::WithinRel;

namespace {

BoundInputs fig1_inputs() { return BoundInputs{2, std::sqrt(10.0), 4.0, 10.0, 10.0}; }

// Frozen by high-precision substitution into the closed forms:
// n1 = 12.8 ln 20, nrand = 28 ln 20 at the canonical parameters.
constexpr double kN1AtR1 = 38.345373101491085;
constexpr double kNRand = 83.880503659511748;

}  // namespace

TEST_CASE("n1 closed form at the canonical parameters") {
    const BoundInputs in = fig1_inputs();
    CHECK_THAT(lsqb::n1(in, 1.0, 0.2), WithinRel(kN1AtR1, 1e-13));
    CHECK_THAT(lsqb::n1(in, 0.5, 0.2), WithinRel(4.0 * kN1AtR1, 1e-13));
    CHECK(lsqb::n1(in, 0.5, 0.2) == 4.0 * lsqb::n1(in, 1.0, 0.2));
    CHECK(lsqb::n1(in, 1.0, 4.0) == 0.0);  // eps = 2p
}

TEST_CASE("n1 exact scale relations") {
    const BoundInputs base = fig1_inputs();
    const double ref = lsqb::n1(base, 0.7, 0.1);

    BoundInputs d2 = base;
    d2.delta *= 3.0;
    CHECK_THAT(lsqb::n1(d2, 0.7, 0.1), WithinRel(9.0 * ref, 1e-13));

    BoundInputs a2 = base;
    a2.alpha *= 2.0;
    CHECK_THAT(lsqb::n1(a2, 0.7, 0.1), WithinRel(4.0 * ref, 1e-13));

    CHECK_THAT(lsqb::n1(base, 0.07, 0.1), WithinRel(100.0 * ref, 1e-13));
}

TEST_CASE("nrand closed form") {
    const BoundInputs in = fig1_inputs();
    CHECK_THAT(lsqb::n_rand(in, 0.2), WithinRel(kNRand, 1e-13));
    CHECK(lsqb::n_rand(in, 4.0) == 0.0);

    // sigma_min = sigma_max = s and p alpha^2 = s: the scale cancels exactly
    for (double s : {0.5, 10.0, 4000.0}) {
        const BoundInputs scale{2, std::sqrt(s / 2.0), 1.0, s, s};
        CHECK_THAT(lsqb::n_rand(scale, 0.2), WithinRel(56.0 / 3.0 * std::log(20.0), 1e-12));
    }
}

TEST_CASE("n_required takes the ceiling of the binding term") {
    const BoundInputs in = fig1_inputs();
    CHECK(lsqb::n_required(in, 0.25, 0.2).n == 614);
    CHECK(lsqb::n_required(in, 0.5, 0.2).n == 154);
    CHECK(lsqb::n_required(in, 1.0, 0.2).n == 84);
    CHECK(lsqb::n_required(in, 2.0, 0.2).n == 84);
    CHECK(lsqb::n_required(in, 1e6, 0.2).n == 84);  // n1 -> 0, nrand binds

    const BoundResult degenerate = lsqb::n_required(in, 1.0, 4.0);
    CHECK(degenerate.n == 0);
    CHECK(degenerate.degenerate);
    CHECK(degenerate.log_term == 0.0);
    CHECK_FALSE(lsqb::n_required(in, 1.0, 0.2).degenerate);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int i = 0; i < 200; ++i) {
        const double smin = u(rng);
        const BoundInputs rand_in{3, 2.0, u(rng), smin, smin + u(rng)};
        const BoundResult res = lsqb::n_required(rand_in, u(rng), 0.05 * u(rng));
        CHECK(res.n == static_cast<long long>(std::ceil(std::max(res.n1, res.nrand))));
        CHECK(res.n1 >= 0.0);
        CHECK(res.nrand >= 0.0);
    }
}

TEST_CASE("invert_r solves the radius and reports infeasibility") {
    const BoundInputs in = fig1_inputs();
    const auto r84 = lsqb::invert_r(in, 84, 0.2);
    REQUIRE(r84.has_value());
    CHECK_THAT(*r84, WithinRel(0.67564231433689299, 1e-13));

    const auto r154 = lsqb::invert_r(in, 154, 0.2);
    REQUIRE(r154.has_value());
    CHECK_THAT(*r154, WithinRel(0.49899491904273092, 1e-13));

    // nrand(0.2) = 83.88...: at n = 83 no radius helps
    CHECK_FALSE(lsqb::invert_r(in, 83, 0.2).has_value());
}

TEST_CASE("invert_eps evaluates the analytic maximum") {
    const BoundInputs in = fig1_inputs();
    // 2p exp(-84/28) = 4 e^{-3}: the design-concentration term dominates at r = 1
    CHECK_THAT(lsqb::invert_eps(in, 84, 1.0), WithinRel(0.19914827347145577, 1e-13));
    // at small r the noise term dominates: 4 exp(-84/1280)
    CHECK_THAT(lsqb::invert_eps(in, 84, 0.1), WithinRel(4.0 * std::exp(-84.0 / 1280.0), 1e-13));
    CHECK(lsqb::invert_eps(in, 2'000'000'000ll, 1.0) < 1e-300);
}

TEST_CASE("round trips between n_required, invert_r and invert_eps") {
    const BoundInputs in = fig1_inputs();
    for (double r : {0.25, 0.5, 1.0, 2.0}) {
        for (double eps : {0.01, 0.1, 0.2}) {
            const long long n = lsqb::n_required(in, r, eps).n;
            CHECK(lsqb::invert_eps(in, n + 1, r) <= eps);
            const auto r_back = lsqb::invert_r(in, n + 1, eps);
            REQUIRE(r_back.has_value());
            CHECK(*r_back <= r);
        }
    }
}

TEST_CASE("monotonicity of the required sample count") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.2, 2.0);
    for (int i = 0; i < 100; ++i) {
        const double smin = u(rng);
        const BoundInputs in{2, 1.5, u(rng), smin, smin + 0.5 * u(rng)};
        const double r = u(rng);
        const double eps = 0.1 * u(rng);
        const double n = std::max(lsqb::n1(in, r, eps), lsqb::n_rand(in, eps));

        auto value = [&](const BoundInputs& v, double rr, double ee) {
            return std::max(lsqb::n1(v, rr, ee), lsqb::n_rand(v, ee));
        };
        CHECK(value(in, r * 1.1, eps) <= n);
        CHECK(value(in, r, eps * 1.1) <= n);

        BoundInputs harder = in;
        harder.delta *= 1.1;
        CHECK(value(harder, r, eps) >= n);
        harder = in;
        harder.alpha *= 1.1;
        CHECK(value(harder, r, eps) >= n);
        harder = in;
        harder.sigma_min *= 0.9;  // larger 1 / sigma_min
        CHECK(value(harder, r, eps) >= n);
    }
}

TEST_CASE("two-term crossover radius") {
    const BoundInputs in = fig1_inputs();
    const double rstar = lsqb::crossover_r(in);
    CHECK_THAT(rstar, WithinRel(0.67612340378281326, 1e-13));
    CHECK_THAT(lsqb::n1(in, rstar, 0.2), WithinRel(lsqb::n_rand(in, 0.2), 1e-9));
    CHECK(lsqb::n1(in, rstar * (1.0 - 1e-6), 0.2) > lsqb::n_rand(in, 0.2));
    CHECK(lsqb::n1(in, rstar * (1.0 + 1e-6), 0.2) < lsqb::n_rand(in, 0.2));
}

TEST_CASE("growth law: required n times r^2 over the log factor is flat") {
    const BoundInputs in = fig1_inputs();
    const double rstar = lsqb::crossover_r(in);
    const double ref = lsqb::n1(in, 0.9 * rstar, 0.2) * (0.9 * rstar) * (0.9 * rstar) / std::log(4.0 / 0.2);
    for (double frac : {0.1, 0.3, 0.6, 0.99}) {
        const double r = frac * rstar;
        for (double eps : {0.01, 0.05, 0.2}) {
            const double n = std::max(lsqb::n1(in, r, eps), lsqb::n_rand(in, eps));
            CHECK(n == lsqb::n1(in, r, eps));  // below the crossover the r term binds
            CHECK_THAT(n * r * r / std::log(4.0 / eps), WithinRel(ref, 1e-12));
        }
    }
}

TEST_CASE("domain errors") {
    const BoundInputs in = fig1_inputs();
    CHECK_THROWS_AS(lsqb::n1(in, 0.0, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(lsqb::n1(in, -1.0, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(lsqb::n1(in, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(lsqb::n_rand(in, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(lsqb::invert_r(in, 0, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(lsqb::invert_eps(in, 84, 0.0), std::invalid_argument);

    BoundInputs bad = in;
    bad.alpha = 0.0;
    CHECK_THROWS_AS(lsqb::n1(bad, 1.0, 0.2), std::invalid_argument);
    bad = in;
    bad.delta = -1.0;
    CHECK_THROWS_AS(lsqb::n1(bad, 1.0, 0.2), std::invalid_argument);
    bad = in;
    bad.sigma_min = 0.0;
    CHECK_THROWS_AS(lsqb::n1(bad, 1.0, 0.2), std::invalid_argument);
    bad = in;
    bad.sigma_max = 5.0;  // < sigma_min
    CHECK_THROWS_AS(lsqb::n1(bad, 1.0, 0.2), std::invalid_argument);
    bad = in;
    bad.sigma_max = 30.0;  // > p alpha^2 = 20
    CHECK_THROWS_AS(lsqb::n1(bad, 1.0, 0.2), std::invalid_argument);
    bad = in;
    bad.p = 0;
    CHECK_THROWS_AS(lsqb::n1(bad, 1.0, 0.2), std::invalid_argument);
}
