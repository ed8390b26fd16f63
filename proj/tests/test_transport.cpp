#include <doctest.h>

#include <numeric>

#include "mms/transport.hpp"
#include "test_support.hpp"

using namespace mms;

namespace {

// Exhaustive basic-solution oracle: every spanning set of cells that solves the
// marginal equations nonnegatively is scored; tiny instances only.
double transport_oracle(const std::vector<double>& mu0, const std::vector<double>& mu1,
                        const DistMatrix& cost) {
    const std::size_t n = cost.size();
    const std::size_t cells = n * n;
    double best = kInf;
    const std::size_t basis_size = 2 * n - 1;
    std::vector<std::size_t> idx(basis_size);
    // iterate over all subsets of size 2n-1 via combinations
    std::vector<std::size_t> comb(basis_size);
    for (std::size_t i = 0; i < basis_size; ++i) comb[i] = i;
    auto advance = [&]() {
        std::size_t i = basis_size;
        while (i-- > 0) {
            if (comb[i] != i + cells - basis_size) {
                ++comb[i];
                for (std::size_t j = i + 1; j < basis_size; ++j) comb[j] = comb[j - 1] + 1;
                return true;
            }
        }
        return false;
    };
    do {
        // solve the marginal equations restricted to the chosen cells by
        // elimination: repeatedly find a row/col with a single free cell
        std::vector<double> flow(cells, 0.0);
        std::vector<char> in_basis(cells, 0);
        for (std::size_t c : comb) in_basis[c] = 1;
        std::vector<double> rs = mu0, cs = mu1;
        std::vector<std::size_t> open(comb.begin(), comb.end());
        bool progress = true, ok = true;
        while (!open.empty() && progress && ok) {
            progress = false;
            for (std::size_t r = 0; r < n && ok; ++r) {
                std::size_t count = 0, last = 0;
                for (std::size_t c : open)
                    if (c / n == r) {
                        ++count;
                        last = c;
                    }
                if (count == 1) {
                    const double v = rs[r];
                    if (v < -1e-9) ok = false;
                    flow[last] = v;
                    rs[r] -= v;
                    cs[last % n] -= v;
                    open.erase(std::find(open.begin(), open.end(), last));
                    progress = true;
                }
            }
            for (std::size_t c = 0; c < n && ok; ++c) {
                std::size_t count = 0, last = 0;
                for (std::size_t cell : open)
                    if (cell % n == c) {
                        ++count;
                        last = cell;
                    }
                if (count == 1) {
                    const double v = cs[c];
                    if (v < -1e-9) ok = false;
                    flow[last] = v;
                    cs[c] -= v;
                    rs[last / n] -= v;
                    open.erase(std::find(open.begin(), open.end(), last));
                    progress = true;
                }
            }
        }
        if (!ok || !open.empty()) continue;
        bool feasible = true;
        for (double v : rs)
            if (std::abs(v) > 1e-9) feasible = false;
        for (double v : cs)
            if (std::abs(v) > 1e-9) feasible = false;
        double val = 0.0;
        for (std::size_t cell = 0; cell < cells; ++cell) {
            if (!in_basis[cell]) continue;
            if (flow[cell] < -1e-9) feasible = false;
            if (flow[cell] > 0.0) {
                if (!is_finite(cost(cell / n, cell % n))) feasible = false;
                else val += cost(cell / n, cell % n) * flow[cell];
            }
        }
        if (feasible) best = std::min(best, val);
    } while (advance());
    return best;
}

} // namespace

TEST_CASE("identity transport costs nothing") {
    const DiscreteSpace s = testing::two_node_space();
    const std::vector<double> mu{0.7, 0.3};
    const auto res = kr_primal(mu, mu, s.dist());
    CHECK(res.value == doctest::Approx(0.0));
}

TEST_CASE("dirac to dirac pays the distance") {
    const DiscreteSpace s = testing::two_node_space(2.5);
    const auto res = kr_primal({1.0, 0.0}, {0.0, 1.0}, s.dist());
    CHECK(res.value == doctest::Approx(2.5));
    const auto dual = kr_dual({1.0, 0.0}, {0.0, 1.0}, s.dist());
    CHECK(dual.value == doctest::Approx(2.5));
    CHECK(dual.potential[0] - dual.potential[1] == doctest::Approx(2.5));
}

TEST_CASE("half mass move on two nodes") {
    const DiscreteSpace s = testing::two_node_space();
    const auto res = kr_primal({1.0, 0.0}, {0.5, 0.5}, s.dist());
    CHECK(res.value == doctest::Approx(0.5));
}

TEST_CASE("mass mismatch raises") {
    const DiscreteSpace s = testing::two_node_space();
    CHECK_THROWS_AS(kr_primal({1.0, 0.0}, {0.5, 0.0}, s.dist()), Error);
}

TEST_CASE("infeasible across infinite separation") {
    DistMatrix d(2, kInf);
    d(0, 0) = d(1, 1) = 0.0;
    const auto res = kr_primal({1.0, 0.0}, {0.0, 1.0}, d);
    CHECK_FALSE(res.finite);
    CHECK(std::isinf(res.value));
}

TEST_CASE("primal and dual agree on random four node instances against the oracle") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        const DiscreteSpace s = testing::random_connected_space(4, 3, rng);
        std::vector<double> mu0 = testing::random_vector(4, rng, 0.0, 1.0);
        std::vector<double> mu1 = testing::random_vector(4, rng, 0.0, 1.0);
        const double m0 = std::accumulate(mu0.begin(), mu0.end(), 0.0);
        const double m1 = std::accumulate(mu1.begin(), mu1.end(), 0.0);
        for (double& v : mu1) v *= m0 / m1;

        const auto primal = kr_primal(mu0, mu1, s.dist());
        const auto dual = kr_dual(mu0, mu1, s.dist());
        CHECK(std::abs(primal.value - dual.value) <= 1e-8);

        const double oracle = transport_oracle(mu0, mu1, s.dist());
        CHECK(primal.value == doctest::Approx(oracle).epsilon(1e-9));

        // returned coupling has the right marginals
        for (std::size_t i = 0; i < 4; ++i) {
            double row = 0.0, col = 0.0;
            for (std::size_t j = 0; j < 4; ++j) {
                row += primal.coupling(i, j);
                col += primal.coupling(j, i);
            }
            CHECK(row == doctest::Approx(mu0[i]).epsilon(1e-9));
            CHECK(col == doctest::Approx(mu1[i]).epsilon(1e-9));
        }
        // returned potential is feasible
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                CHECK(dual.potential[i] - dual.potential[j] <= s.dist()(i, j) + 1e-10);
    }
}

TEST_CASE("KR is a semidistance: symmetry and triangle on sampled measures") {
    std::mt19937_64 rng(5);
    const DiscreteSpace s = testing::random_connected_space(5, 4, rng);
    for (int trial = 0; trial < 10; ++trial) {
        auto normalize_mass = [&](std::vector<double> v) {
            double tot = std::accumulate(v.begin(), v.end(), 0.0);
            for (double& x : v) x /= tot;
            return v;
        };
        const auto a = normalize_mass(testing::random_vector(5, rng, 0.01, 1.0));
        const auto b = normalize_mass(testing::random_vector(5, rng, 0.01, 1.0));
        const auto c = normalize_mass(testing::random_vector(5, rng, 0.01, 1.0));
        const double ab = kr_primal(a, b, s.dist()).value;
        const double ba = kr_primal(b, a, s.dist()).value;
        const double ac = kr_primal(a, c, s.dist()).value;
        const double cb = kr_primal(c, b, s.dist()).value;
        CHECK(ab == doctest::Approx(ba).epsilon(1e-10));
        CHECK(ab <= ac + cb + 1e-7);
    }
}

TEST_CASE("monotone limit along a truncated family") {
    DistMatrix d(2, 0.0);
    d(0, 1) = d(1, 0) = 3.0;
    const DiscreteSpace s = DiscreteSpace::from_matrix({"x", "y"}, d, {1.0, 1.0});
    const SemidistanceFamily fam = truncated_family(s, {1.0, 2.0, 3.0});
    const auto rep = kr_monotone_limit({1.0, 0.0}, {0.0, 1.0}, fam, s);
    CHECK(rep.nondecreasing);
    REQUIRE(rep.values.size() == 3);
    CHECK(rep.values[0] == doctest::Approx(1.0));
    CHECK(rep.values[1] == doctest::Approx(2.0));
    CHECK(rep.values[2] == doctest::Approx(3.0));
    CHECK(rep.final_vs_dist <= 1e-12);
}

TEST_CASE("monotone limit trivial cases") {
    const DiscreteSpace s = testing::two_node_space();
    const SemidistanceFamily fam = truncated_family(s, {1.0});
    const auto constant = kr_monotone_limit({1.0, 0.0}, {0.0, 1.0}, fam, s);
    CHECK(constant.values.size() == 1);
    CHECK(constant.final_vs_dist <= 1e-12);
    const auto zero = kr_monotone_limit({0.5, 0.5}, {0.5, 0.5}, fam, s);
    CHECK(zero.values[0] == doctest::Approx(0.0));
}

TEST_CASE("monotonicity of KR in the ground metric") {
    std::mt19937_64 rng(9);
    const DiscreteSpace s = testing::random_connected_space(6, 5, rng);
    const SemidistanceFamily fam =
        truncated_family(s, {0.4, 1.1, s.max_finite_dist() + 0.2});
    auto normalize_mass = [&](std::vector<double> v) {
        double tot = std::accumulate(v.begin(), v.end(), 0.0);
        for (double& x : v) x /= tot;
        return v;
    };
    const auto a = normalize_mass(testing::random_vector(6, rng, 0.01, 1.0));
    const auto b = normalize_mass(testing::random_vector(6, rng, 0.01, 1.0));
    double prev = -1.0;
    for (std::size_t m = 0; m < fam.size(); ++m) {
        const double v = kr_primal(a, b, fam.member(m)).value;
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
}
