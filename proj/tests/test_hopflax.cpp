#include <doctest.h>

#include <cmath>

#include "mms/hopflax.hpp"
#include "test_support.hpp"

using namespace mms;

namespace {

std::vector<int> all_nodes(const DiscreteSpace& s) {
    std::vector<int> v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) v[i] = (int)i;
    return v;
}

std::vector<double> log_grid(double a, double b, int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i)
        out.push_back(a * std::pow(b / a, (double)i / (count - 1)));
    return out;
}

} // namespace

TEST_CASE("constant f is a fixed point with zero spread") {
    const DiscreteSpace s = testing::two_node_space();
    const std::vector<double> f{0.4, 0.4};
    const auto st = hopf_lax(f, 0.7, s, all_nodes(s), s.dist(), 2.0);
    for (std::size_t x = 0; x < 2; ++x) {
        CHECK(st.values[x] == doctest::Approx(0.4));
        CHECK(st.d_plus[x] == doctest::Approx(0.0));
        CHECK(st.d_minus[x] == doctest::Approx(0.0));
        CHECK(std::find(st.minimizers[x].begin(), st.minimizers[x].end(), (int)x) !=
              st.minimizers[x].end());
    }
}

TEST_CASE("two node closed form at p = q = 2, t = 1") {
    const DiscreteSpace s = testing::two_node_space();
    const std::vector<double> f{0.0, 1.0};
    const auto st = hopf_lax(f, 1.0, s, all_nodes(s), s.dist(), 2.0);
    CHECK(st.values[0] == doctest::Approx(0.0));
    CHECK(st.values[1] == doctest::Approx(0.5));
    CHECK(st.minimizers[1] == std::vector<int>{0});
    CHECK(st.d_plus[1] == doctest::Approx(1.0));
    CHECK(st.d_minus[1] == doctest::Approx(1.0));
}

TEST_CASE("small time recovers f") {
    const DiscreteSpace s = testing::two_node_space();
    const std::vector<double> f{0.0, 1.0};
    for (double t : {0.4, 0.1, 0.01}) {
        const auto st = hopf_lax(f, t, s, all_nodes(s), s.dist(), 2.0);
        CHECK(st.values[1] == doctest::Approx(std::min(1.0, 1.0 / (2.0 * t))));
    }
}

TEST_CASE("empty K is rejected") {
    const DiscreteSpace s = testing::two_node_space();
    CHECK_THROWS_AS(hopf_lax({0.0, 1.0}, 1.0, s, {}, s.dist(), 2.0), Error);
}

TEST_CASE("spread integral reproduces the closed form at p = 2") {
    const DiscreteSpace s = testing::two_node_space();
    const std::vector<double> f{0.0, 1.0};
    for (double t : {0.75, 1.0, 2.0, 5.0}) {
        const double expected = 1.0 - 1.0 / (2.0 * t); // piecewise closed form
        const double got = spread_integral(f, s, s.dist(), 2.0, 1, t, 1e-8);
        CHECK(got == doctest::Approx(expected).epsilon(1e-7));
    }
    CHECK(spread_integral(f, s, s.dist(), 2.0, 1, 0.4, 1e-8) == doctest::Approx(0.0));
}

TEST_CASE("spread integral reproduces the closed form at p = 3") {
    // switch time t* = 4/9; for t >= t*: f(y) - Q_t f(y) = 1 - (2/3) t^{-1/2}
    const DiscreteSpace s = testing::two_node_space();
    const std::vector<double> f{0.0, 1.0};
    for (double t : {0.5, 1.0, 3.0}) {
        const double expected = 1.0 - (2.0 / 3.0) / std::sqrt(t);
        const double got = spread_integral(f, s, s.dist(), 3.0, 1, t, 1e-8);
        CHECK(got == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("two node slope cap closed form") {
    // q = 2, D = 1 for t >= 1/2: (D/t)^2 <= min(2 Osc / t, (2 Lip)^2)
    const DiscreteSpace s = testing::two_node_space();
    const std::vector<double> f{0.0, 1.0};
    for (double t : {0.5, 1.0, 2.0}) {
        const auto st = hopf_lax(f, t, s, all_nodes(s), s.dist(), 2.0);
        const double lhs = std::pow(st.d_plus[1] / t, 2.0);
        CHECK(lhs <= std::min(2.0 / t, 4.0) + 1e-12);
    }
    const auto rep = estimate_suite(f, s, s.dist(), log_grid(0.05, 6.0, 16), 2.0);
    CHECK(rep.pass());
}

TEST_CASE("estimate suite: constant f has zero residuals") {
    const DiscreteSpace s = testing::path_space(4);
    const auto rep = estimate_suite({1.0, 1.0, 1.0, 1.0}, s, s.dist(), log_grid(0.01, 10.0, 16), 2.0);
    CHECK(rep.pass());
    for (const auto& c : rep.checks) CHECK(c.worst_residual <= 1e-12);
}

TEST_CASE("estimate suite passes on seeded random instances") {
    std::mt19937_64 rng(55);
    for (double p : {1.5, 2.0, 3.0}) {
        const DiscreteSpace s = testing::random_connected_space(6, 5, rng);
        const auto f = testing::random_vector(s.size(), rng);
        const auto rep = estimate_suite(f, s, s.dist(), log_grid(0.005, 8.0, 24), p);
        for (const auto& c : rep.checks) {
            INFO(c.name, " residual ", c.worst_residual);
            CHECK(c.pass);
        }
        CHECK(rep.d_gap_times <= rep.d_gap_allowance);
    }
}

TEST_CASE("time Lipschitz cap along the grid") {
    std::mt19937_64 rng(77);
    const DiscreteSpace s = testing::random_connected_space(5, 4, rng);
    const auto f = testing::random_vector(s.size(), rng);
    const double p = 2.0, q = 2.0;
    double lip = 0.0;
    for (std::size_t x = 0; x < s.size(); ++x)
        for (std::size_t y = 0; y < s.size(); ++y)
            if (x != y && is_finite(s.dist()(x, y)))
                lip = std::max(lip, std::abs(f[x] - f[y]) / s.dist()(x, y));
    const auto grid = log_grid(0.05, 4.0, 20);
    std::vector<HopfLaxState> states;
    for (double t : grid) states.push_back(hopf_lax(f, t, s, all_nodes(s), s.dist(), p));
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double sshort = grid[i], tlong = grid[i + 1];
        for (std::size_t x = 0; x < s.size(); ++x) {
            const double quotient =
                std::abs(states[i].values[x] - states[i + 1].values[x]) / (tlong - sshort);
            const double cap = std::pow(q * lip, p) / p * std::pow(tlong / sshort, q);
            CHECK(quotient <= cap + 1e-9 * (1.0 + cap));
            CHECK(states[i + 1].values[x] <= states[i].values[x] + 1e-12);
        }
    }
}

TEST_CASE("monotone in K on the two node chain") {
    const DiscreteSpace s = testing::two_node_space();
    const std::vector<double> f{0.0, 1.0};
    const auto rep = monotone_in_K(f, s, s.dist(), {{0}, {0, 1}}, 0.8, 2.0);
    CHECK(rep.pass);
    // explicit comparison of the two evaluations at node y
    const auto first = hopf_lax(f, 0.8, s, {0}, s.dist(), 2.0);
    const auto second = hopf_lax(f, 0.8, s, {0, 1}, s.dist(), 2.0);
    CHECK(first.values[1] >= second.values[1]);
    CHECK(first.values[1] == doctest::Approx(0.0 + 1.0 / (2.0 * 0.8)));
}

TEST_CASE("monotone in K: single step chain and constant f") {
    const DiscreteSpace s = testing::path_space(4);
    const auto rep = monotone_in_K({2, 2, 2, 2}, s, s.dist(), {{0, 1, 2, 3}}, 1.0, 2.0);
    CHECK(rep.pass);
    std::mt19937_64 rng(4);
    const auto f = testing::random_vector(4, rng);
    const auto rep2 = monotone_in_K(f, s, s.dist(), {{1}, {1, 3}, {0, 1, 2, 3}}, 0.5, 2.0);
    CHECK(rep2.pass);
}

TEST_CASE("monotone in delta along a truncated family") {
    DistMatrix d(2, 0.0);
    d(0, 1) = d(1, 0) = 3.0;
    const DiscreteSpace s = DiscreteSpace::from_matrix({"x", "y"}, d, {1.0, 1.0});
    const SemidistanceFamily fam = truncated_family(s, {1.0, 2.0, 3.0});
    const std::vector<double> f{0.0, 1.0};
    // Q values at y: min(1, d^2/2) = 0.5, 1, 1 -> strictly increase then stabilize
    std::vector<int> all{0, 1};
    CHECK(hopf_lax(f, 1.0, s, all, fam.member(0), 2.0).values[1] == doctest::Approx(0.5));
    CHECK(hopf_lax(f, 1.0, s, all, fam.member(1), 2.0).values[1] == doctest::Approx(1.0));
    CHECK(hopf_lax(f, 1.0, s, all, fam.member(2), 2.0).values[1] == doctest::Approx(1.0));
    CHECK(monotone_in_delta(f, s, fam, 1.0, 2.0).pass);
    CHECK(monotone_in_delta({0.7, 0.7}, s, fam, 1.0, 2.0).pass);
}

TEST_CASE("minimizer-switch count stays within the allowance") {
    std::mt19937_64 rng(91);
    const DiscreteSpace s = testing::random_connected_space(8, 7, rng);
    const auto f = testing::random_vector(s.size(), rng);
    const auto rep = estimate_suite(f, s, s.dist(), log_grid(0.01, 20.0, 32), 2.0);
    CHECK(rep.d_gap_times <= (int)(s.size() * s.size()));
}
