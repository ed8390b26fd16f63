#include <doctest.h>

#include "mms/arcs.hpp"
#include "test_support.hpp"

using namespace mms;

TEST_CASE("arc lengths") {
    const DiscreteSpace s = testing::path_space(3);
    CHECK(Arc({0}, s).length() == 0.0);
    CHECK(Arc({0, 1}, s).length() == doctest::Approx(1.0));
    CHECK(Arc({0, 1, 2}, s).length() == doctest::Approx(2.0));
}

TEST_CASE("line integral: unit density gives the length") {
    const DiscreteSpace s = testing::path_space(4);
    const Arc a({0, 1, 2, 3}, s);
    CHECK(line_integral({1, 1, 1, 1}, a) == doctest::Approx(a.length()));
}

TEST_CASE("line integral matches the hand trapezoid sum and the measure pairing") {
    const DiscreteSpace s = testing::path_space(3);
    const Arc a({0, 1, 2}, s);
    const std::vector<double> f{1.0, 2.0, 1.0};
    CHECK(line_integral(f, a) == doctest::Approx(3.0)); // 1.5 + 1.5
    const std::vector<double> nu = arc_measure(a, s.size());
    double paired = 0.0;
    for (std::size_t x = 0; x < 3; ++x) paired += nu[x] * f[x];
    CHECK(paired == doctest::Approx(line_integral(f, a)));
}

TEST_CASE("constant arc integrates to zero") {
    const DiscreteSpace s = testing::path_space(2);
    CHECK(line_integral({5.0, 7.0}, Arc({1}, s)) == 0.0);
}

TEST_CASE("arc measure mass equals length, exactly, on random arcs") {
    std::mt19937_64 rng(3);
    const DiscreteSpace s = testing::random_connected_space(9, 6, rng);
    const auto arcs = simple_paths(s, {0}, {(int)s.size() - 1}, 5);
    for (const Arc& a : arcs) {
        const std::vector<double> nu = arc_measure(a, s.size());
        double mass = 0.0;
        for (double v : nu) mass += v;
        CHECK(mass == doctest::Approx(a.length()).epsilon(1e-14));
    }
}

TEST_CASE("normalize removes stationary steps and canonicalizes orientation") {
    const DiscreteSpace s = testing::two_node_space();
    const Arc a({0, 0, 1}, s);
    CHECK(normalize(a, s).nodes() == std::vector<int>{0, 1});
    CHECK(normalize(Arc({1, 1, 0, 0}, s), s).nodes() == std::vector<int>{0, 1});
    const Arc already({0, 1}, s);
    CHECK(normalize(already, s).nodes() == already.nodes());
    CHECK(normalize(normalize(a, s), s).nodes() == normalize(a, s).nodes());
}

TEST_CASE("restrict snaps to breakpoints") {
    const DiscreteSpace s = testing::path_space(3);
    const Arc a({0, 1, 2}, s);
    CHECK(restrict(a, 0.0, 1.0, s).nodes() == a.nodes());
    CHECK(restrict(a, 0.0, 0.5, s).nodes() == std::vector<int>{0, 1});
    CHECK(restrict(a, 0.5, 1.0, s).nodes() == std::vector<int>{1, 2});
    CHECK_THROWS_AS(restrict(a, 0.1, 0.2, s), Error); // both snap to node 0
}

TEST_CASE("restriction halves concatenate back to the whole sequence") {
    const DiscreteSpace s = testing::path_space(6);
    const Arc a({0, 1, 2, 3, 4, 5}, s);
    for (double u : {0.2, 0.4, 0.6, 0.8}) {
        const Arc left = restrict(a, 0.0, u, s);
        const Arc right = restrict(a, u, 1.0, s);
        std::vector<int> glued = left.nodes();
        glued.insert(glued.end(), right.nodes().begin() + 1, right.nodes().end());
        CHECK(glued == a.nodes());
    }
}

TEST_CASE("line integral is linear and additive under concatenation") {
    const DiscreteSpace s = testing::path_space(5);
    const Arc whole({0, 1, 2, 3, 4}, s);
    const Arc left({0, 1, 2}, s), right({2, 3, 4}, s);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = testing::random_vector(s.size(), rng);
        const auto g = testing::random_vector(s.size(), rng);
        std::vector<double> combo(s.size());
        for (std::size_t x = 0; x < s.size(); ++x) combo[x] = 2.0 * f[x] - 3.0 * g[x];
        CHECK(line_integral(combo, whole) ==
              doctest::Approx(2.0 * line_integral(f, whole) - 3.0 * line_integral(g, whole)));
        CHECK(line_integral(f, whole) ==
              doctest::Approx(line_integral(f, left) + line_integral(f, right)));
    }
}

TEST_CASE("connector enumeration on a single edge") {
    const DiscreteSpace s = testing::two_node_space();
    const auto arcs = enumerate_family(PathFamily::connector({0}, {1}, 1), s);
    REQUIRE(arcs.size() == 1);
    CHECK(arcs[0].nodes() == std::vector<int>{0, 1});
}

TEST_CASE("connector on the path graph finds the unique simple path") {
    const DiscreteSpace s = testing::path_space(3);
    const auto arcs = enumerate_family(PathFamily::connector({0}, {2}, 2), s);
    REQUIRE(arcs.size() == 1);
    CHECK(arcs[0].nodes() == std::vector<int>{0, 1, 2});
}

TEST_CASE("triangle connector matches exhaustive enumeration") {
    const DiscreteSpace s = testing::triangle_space();
    const auto arcs = enumerate_family(PathFamily::connector({0}, {1}, 2), s);
    REQUIRE(arcs.size() == 2);
    CHECK(arcs[0].nodes() == std::vector<int>{0, 1});
    CHECK(arcs[1].nodes() == std::vector<int>{0, 2, 1});
}

TEST_CASE("enumeration cap throws on a combinatorial blow-up") {
    // complete graph on 12 nodes: far more than 10^6 simple paths
    const int n = 12;
    std::vector<std::string> names;
    std::vector<std::tuple<int, int, double>> edges;
    std::vector<double> measure((std::size_t)n, 1.0);
    for (int i = 0; i < n; ++i) {
        names.push_back(std::to_string(i));
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j, 1.0);
    }
    const DiscreteSpace s = DiscreteSpace::from_graph(names, edges, measure);
    try {
        enumerate_family(PathFamily::connector({0}, {n - 1}, 12), s);
        FAIL("expected FamilyTooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FamilyTooLarge);
    }
}

TEST_CASE("connector guard and duplicate removal") {
    const DiscreteSpace s = testing::triangle_space();
    CHECK_THROWS_AS(enumerate_family(PathFamily::connector({0}, {1}, 13), s), Error);
    const Arc fwd({0, 1}, s), bwd({1, 0}, s), padded({0, 0, 1}, s);
    const auto arcs = enumerate_family(PathFamily::explicit_family({fwd, bwd, padded}), s);
    CHECK(arcs.size() == 1);
}
