#include <doctest.h>

#include <cmath>
#include <random>

#include "mms/polyapprox.hpp"

using namespace mms;

TEST_CASE("bernstein reproduces affine functions to rounding") {
    const Poly p = bernstein([](double r) { return 3.0 * r - 0.7; }, 2.0, 32);
    for (double r = -2.0; r <= 2.0; r += 1.0 / 64.0)
        CHECK(std::abs(p.eval(r) - (3.0 * r - 0.7)) <= 1e-12);
}

TEST_CASE("bernstein of a constant is constant") {
    const Poly p = bernstein([](double) { return 4.25; }, 1.0, 16);
    for (double r = -1.0; r <= 1.0; r += 0.01) CHECK(p.eval(r) == doctest::Approx(4.25));
}

TEST_CASE("bernstein of the positive part converges at the expected rate") {
    const Poly p = bernstein([](double r) { return std::max(r, 0.0); }, 4.0, 64);
    double worst = 0.0;
    for (int i = 0; i <= 4096; ++i) {
        const double r = -4.0 + 8.0 * i / 4096.0;
        worst = std::max(worst, std::abs(p.eval(r) - std::max(r, 0.0)));
    }
    CHECK(worst <= 0.25);
}

TEST_CASE("high degree evaluation stays stable") {
    const Poly p = bernstein([](double r) { return std::max(r, 0.0); }, 1.0, 2048);
    CHECK(p.eval(0.5) == doctest::Approx(0.5).epsilon(1e-2));
    CHECK(p.eval(-0.75) == doctest::Approx(0.0).epsilon(0.02));
    CHECK(std::abs(p.eval(1.0) - 1.0) <= 1e-9);
    CHECK(std::abs(p.eval(-1.0)) <= 1e-9);
}

TEST_CASE("trunc poly: odd symmetry, bounds and derivative box") {
    const auto res = trunc_poly(2.0, -1.0, 1.0, 0.1);
    CHECK(std::abs(res.poly.eval(0.0)) <= 1e-12);
    CHECK(res.certified_error <= 0.05);
    const Poly dp = res.poly.derivative_poly();
    for (int i = 0; i <= 10000; ++i) {
        const double r = -2.0 + 4.0 * i / 10000.0;
        const double clamp = std::max(-1.0, std::min(r, 1.0));
        CHECK(std::abs(res.poly.eval(r) - clamp) <= 0.1);
        CHECK(res.poly.eval(r) >= -1.0 - 1e-9);
        CHECK(res.poly.eval(r) <= 1.0 + 1e-9);
        const double d = dp.eval(r);
        CHECK(d >= -1e-9);
        CHECK(d <= 1.0 + 1e-9);
    }
    // finite differences agree with the exact derivative polynomial
    for (double r = -1.9; r < 1.9; r += 0.37) {
        const double fd = (res.poly.eval(r + 1e-4) - res.poly.eval(r - 1e-4)) / 2e-4;
        CHECK(fd == doctest::Approx(dp.eval(r)).epsilon(1e-4));
    }
}

TEST_CASE("trunc poly rejects bad inputs and impossible tolerances") {
    CHECK_THROWS_AS(trunc_poly(2.0, 1.0, -1.0, 0.1), Error);
    CHECK_THROWS_AS(trunc_poly(0.5, -1.0, 1.0, 0.1), Error); // c below the clamp levels
    CHECK_THROWS_AS(trunc_poly(2.0, -1.0, 1.0, 1e-9), Error); // degree cap
}

TEST_CASE("smooth max: diagonal exact, range and accuracy") {
    const auto q = smooth_max(1.0, 0.05);
    for (double r = -1.0; r <= 1.0; r += 0.05)
        CHECK(q.eval(r, r) == doctest::Approx(r).epsilon(1e-12));
    const double v = q.eval(0.0, 1.0);
    CHECK(v >= 0.95);
    CHECK(v <= 1.0 + 1e-12);
    for (double r = -1.0; r <= 1.0; r += 0.11)
        for (double s = -1.0; s <= 1.0; s += 0.13) {
            const double val = q.eval(r, s);
            CHECK(val >= std::min(r, s) - 1e-10);
            CHECK(val <= std::max(r, s) + 1e-10);
            CHECK(std::abs(val - std::max(r, s)) <= 0.05);
            CHECK(q.partial_r(r, s) >= -1e-9);
            CHECK(q.partial_r(r, s) <= 1.0 + 1e-9);
            CHECK(q.partial_s(r, s) >= -1e-9);
            CHECK(q.partial_s(r, s) <= 1.0 + 1e-9);
        }
}

TEST_CASE("smooth max joint Lipschitz audit on random pairs") {
    const auto q = smooth_max(1.0, 0.05);
    std::mt19937_64 rng(271828);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double r1 = unif(rng), s1 = unif(rng), r2 = unif(rng), s2 = unif(rng);
        const double denom = std::max(std::abs(r2 - r1), std::abs(s2 - s1));
        if (denom < 1e-9) continue;
        worst = std::max(worst, std::abs(q.eval(r2, s2) - q.eval(r1, s1)) / denom);
    }
    CHECK(worst <= 1.0 + 1e-9);
}

TEST_CASE("smooth max is monotone in each argument") {
    const auto q = smooth_max(0.5, 0.02);
    std::mt19937_64 rng(3141);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    for (int i = 0; i < 2000; ++i) {
        const double r = unif(rng), s = unif(rng);
        const double dr = 1e-3;
        CHECK(q.eval(r + dr, s) >= q.eval(r, s) - 1e-12);
        CHECK(q.eval(r, s + dr) >= q.eval(r, s) - 1e-12);
    }
}
