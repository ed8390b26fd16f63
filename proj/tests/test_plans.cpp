#include <doctest.h>

#include <cmath>

#include "mms/plans.hpp"
#include "test_support.hpp"

using namespace mms;

TEST_CASE("barycentric entropy closed forms") {
    const DiscreteSpace s = testing::two_node_space();
    CHECK(barycentric_entropy({{}, {}}, s, 2.0) == doctest::Approx(0.0));
    // constant arc: zero entropy at any weight
    CHECK(barycentric_entropy({{Arc({0}, s)}, {3.0}}, s, 2.0) == doctest::Approx(0.0));
    // single edge, weight w: h = (w/2, w/2), br_2 = w / sqrt(2)
    for (double w : {1.0, 2.0, 0.25}) {
        const DynamicPlan plan{{Arc({0, 1}, s)}, {w}};
        CHECK(barycentric_entropy(plan, s, 2.0) == doctest::Approx(w / std::sqrt(2.0)));
    }
}

TEST_CASE("entropy pairs with line integrals for random densities") {
    std::mt19937_64 rng(2);
    const DiscreteSpace s = testing::random_connected_space(5, 4, rng);
    const auto arcs = simple_paths(s, {0}, {4}, 3);
    REQUIRE(!arcs.empty());
    std::vector<double> w = testing::random_vector(arcs.size(), rng, 0.0, 1.0);
    const DynamicPlan plan{arcs, w};
    const Barycenter b = barycenter(plan, s);
    for (int trial = 0; trial < 5; ++trial) {
        const auto f = testing::random_vector(s.size(), rng);
        double lhs = 0.0;
        for (std::size_t g = 0; g < arcs.size(); ++g) lhs += w[g] * line_integral(f, arcs[g]);
        double rhs = 0.0;
        for (std::size_t x = 0; x < s.size(); ++x)
            rhs += f[x] * b.density[x] * s.measure(x);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
    // barycenter mass identity
    double mass = 0.0, expected = 0.0;
    for (std::size_t x = 0; x < s.size(); ++x) mass += b.mass[x];
    for (std::size_t g = 0; g < arcs.size(); ++g) expected += w[g] * arcs[g].length();
    CHECK(mass == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("entropy is 1-homogeneous and convex in the weights") {
    std::mt19937_64 rng(8);
    const DiscreteSpace s = testing::random_connected_space(5, 3, rng);
    const auto arcs = simple_paths(s, {0}, {4}, 3);
    REQUIRE(arcs.size() >= 2);
    const auto w1 = testing::random_vector(arcs.size(), rng, 0.0, 1.0);
    const auto w2 = testing::random_vector(arcs.size(), rng, 0.0, 1.0);
    const double q = 1.7;
    const double b1 = barycentric_entropy({arcs, w1}, s, q);
    CHECK(barycentric_entropy({arcs, std::vector<double>(w1.size(), 0.0)}, s, q) == 0.0);
    std::vector<double> scaled = w1;
    for (double& v : scaled) v *= 3.0;
    CHECK(barycentric_entropy({arcs, scaled}, s, q) == doctest::Approx(3.0 * b1).epsilon(1e-12));
    for (double lam : {0.25, 0.5, 0.75}) {
        std::vector<double> mix(w1.size());
        for (std::size_t g = 0; g < w1.size(); ++g) mix[g] = lam * w1[g] + (1.0 - lam) * w2[g];
        const double bm = barycentric_entropy({arcs, mix}, s, q);
        const double b2 = barycentric_entropy({arcs, w2}, s, q);
        CHECK(bm <= lam * b1 + (1.0 - lam) * b2 + 1e-12);
    }
}

TEST_CASE("two node content closed form") {
    const DiscreteSpace s = testing::two_node_space();
    const std::vector<Arc> fam{Arc({0, 1}, s)};
    const auto res = content_p(fam, s, 2.0);
    // sup_w w - w^2/4 = 1 at w = 2; Cont^2 = p * 1 = 2
    CHECK(res.value_pow_p == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(res.plan_mass == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(res.entropy_pow_q == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(res.optimality_residual <= 1e-5);
}

TEST_CASE("content edge cases") {
    const DiscreteSpace s = testing::two_node_space();
    CHECK(content_p({}, s, 2.0).value == 0.0);
    CHECK(std::isinf(content_p({Arc({0}, s)}, s, 2.0).value));
}

TEST_CASE("ratio form agrees with the Legendre form") {
    const DiscreteSpace s = testing::two_node_space();
    const std::vector<Arc> fam{Arc({0, 1}, s)};
    const double ratio = content_ratio_form(fam, s, 2.0);
    CHECK(ratio == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    const auto legendre = content_p(fam, s, 2.0);
    CHECK(ratio == doctest::Approx(legendre.value).epsilon(1e-5));
}

TEST_CASE("measure scaling moves the content by c^(1/p)") {
    const DiscreteSpace base = testing::two_node_space();
    const DiscreteSpace scaled = testing::two_node_space(1.0, 4.0, 4.0);
    const std::vector<Arc> fam_b{Arc({0, 1}, base)};
    const std::vector<Arc> fam_s{Arc({0, 1}, scaled)};
    const double cb = content_p(fam_b, base, 2.0).value;
    const double cs = content_p(fam_s, scaled, 2.0).value;
    CHECK(cs == doctest::Approx(std::sqrt(4.0) * cb).epsilon(1e-5));
    const double rb = content_ratio_form(fam_b, base, 2.0);
    const double rs = content_ratio_form(fam_s, scaled, 2.0);
    CHECK(rs == doctest::Approx(std::sqrt(4.0) * rb).epsilon(1e-5));
}

TEST_CASE("duality certificate on closed forms") {
    const DiscreteSpace s = testing::two_node_space();
    const std::vector<Arc> fam{Arc({0, 1}, s)};
    const auto rep = duality_certificate(fam, s, 2.0);
    CHECK(rep.primal == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(rep.dual == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(rep.relative_gap <= 1e-6);
    CHECK(rep.slackness_residual <= 1e-5);
}

TEST_CASE("duality certificate on the path family and the empty family") {
    const DiscreteSpace s = testing::path_space(3);
    const auto rep = duality_certificate({Arc({0, 1, 2}, s)}, s, 2.0);
    CHECK(rep.relative_gap <= 1e-6);
    const auto empty = duality_certificate({}, s, 2.0);
    CHECK(empty.primal == 0.0);
    CHECK(empty.dual == 0.0);
}

TEST_CASE("tilde duality certificate matches the tilde closed form") {
    const DiscreteSpace s = testing::two_node_space();
    const auto rep = duality_certificate({Arc({0, 1}, s)}, s, 2.0, true);
    CHECK(rep.primal == doctest::Approx(2.0 / 9.0).epsilon(1e-6));
    CHECK(rep.relative_gap <= 1e-5);
    const auto cst = duality_certificate({Arc({0}, s)}, s, 2.0, true);
    CHECK(cst.primal == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(cst.relative_gap <= 1e-5);
}

TEST_CASE("weak duality holds for arbitrary feasible pairs") {
    std::mt19937_64 rng(13);
    const DiscreteSpace s = testing::random_connected_space(6, 5, rng);
    const auto fam = enumerate_family(PathFamily::connector({0}, {(int)s.size() - 1}, 4), s);
    REQUIRE(!fam.empty());
    const double mod = modulus_p(fam, s, 2.0).value;
    for (int trial = 0; trial < 20; ++trial) {
        const auto w = testing::random_vector(fam.size(), rng, 0.0, 2.0);
        const DynamicPlan plan{fam, w};
        double mass = 0.0;
        for (double v : w) mass += v;
        const double br = barycentric_entropy(plan, s, 2.0);
        CHECK(mass <= br * std::pow(mod, 0.5) + 1e-9 * (1.0 + mass));
    }
}

TEST_CASE("tq membership triple") {
    const DiscreteSpace s = testing::two_node_space();
    const auto zero = tq_membership({{}, {}}, s, 2.0);
    CHECK(zero.entropy == 0.0);
    CHECK(zero.initial_marginal_norm == 0.0);
    CHECK(zero.final_marginal_norm == 0.0);

    const DynamicPlan unit{{Arc({0, 1}, s)}, {1.0}};
    const auto rep = tq_membership(unit, s, 2.0);
    CHECK(rep.entropy == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(rep.initial_marginal_norm == doctest::Approx(1.0));
    CHECK(rep.final_marginal_norm == doctest::Approx(1.0));

    const DynamicPlan twice{{Arc({0, 1}, s)}, {2.0}};
    const auto dbl = tq_membership(twice, s, 2.0);
    CHECK(dbl.entropy == doctest::Approx(2.0 * rep.entropy));
    CHECK(dbl.initial_marginal_norm == doctest::Approx(2.0 * rep.initial_marginal_norm));
    CHECK(dbl.final_marginal_norm == doctest::Approx(2.0 * rep.final_marginal_norm));
}

TEST_CASE("duality certificate across exponents on random graphs") {
    std::mt19937_64 rng(101);
    for (double p : {1.5, 2.0, 3.0}) {
        const DiscreteSpace s = testing::random_connected_space(6, 4, rng);
        const auto fam = enumerate_family(PathFamily::connector({0}, {(int)s.size() - 1}, 4), s);
        if (fam.empty()) continue;
        const auto rep = duality_certificate(fam, s, p);
        CHECK(rep.relative_gap <= 1e-5);
        CHECK(rep.slackness_residual <= 1e-5);
    }
}
