#include <doctest.h>

#include "mms/json_io.hpp"

using namespace mms;

TEST_CASE("space from matrix JSON with an absent pair") {
    // the isolated node keeps its infinite separation; absent = infinity
    const json j = json::parse(R"({
        "nodes": ["a", "b", "c"],
        "metric": {"type": "matrix", "entries": [[0,1,1.0]]},
        "measure": [1.0, 1.0, 1.0]
    })");
    const DiscreteSpace s = space_from_json(j);
    CHECK(s.dist(0, 1) == 1.0);
    CHECK(std::isinf(s.dist(0, 2)));
    CHECK(std::isinf(s.dist(1, 2)));
    CHECK_FALSE(s.connected());
}

TEST_CASE("an absent pair bridged by finite hops is a triangle violation") {
    const json j = json::parse(R"({
        "nodes": ["a", "b", "c"],
        "metric": {"type": "matrix", "entries": [[0,1,1.0],[1,2,2.0]]},
        "measure": [1.0, 1.0, 1.0]
    })");
    CHECK_THROWS_AS(space_from_json(j), Error);
}

TEST_CASE("matrix JSON with a triangle violation is rejected") {
    const json j = json::parse(R"({
        "nodes": ["a", "b", "c"],
        "metric": {"type": "matrix", "entries": [[0,1,1.0],[1,2,1.0],[0,2,5.0]]},
        "measure": [1.0, 1.0, 1.0]
    })");
    CHECK_THROWS_AS(space_from_json(j), Error);
}

TEST_CASE("space from graph JSON induces the path metric") {
    const json j = json::parse(R"({
        "nodes": [0, 1, 2],
        "metric": {"type": "graph", "edges": [[0,1,1.0],[1,2,1.0]]},
        "measure": [1.0, 1.0, 1.0]
    })");
    const DiscreteSpace s = space_from_json(j);
    CHECK(s.dist(0, 2) == doctest::Approx(2.0));
    CHECK(s.edges().size() == 2);
}

TEST_CASE("family JSON round trips") {
    const json sj = json::parse(R"({
        "nodes": ["a", "b", "c"],
        "metric": {"type": "graph", "edges": [[0,1,1.0],[1,2,1.0]]},
        "measure": [1.0, 1.0, 1.0]
    })");
    const DiscreteSpace s = space_from_json(sj);

    const json fe = json::parse(R"({"kind": "explicit", "paths": [[0,1,2],[2,1]]})");
    const auto arcs = enumerate_family(family_from_json(fe, s), s);
    CHECK(arcs.size() == 2);

    const json fc = json::parse(R"({"kind": "connector", "source": [0], "target": [2], "maxEdges": 2})");
    const auto carcs = enumerate_family(family_from_json(fc, s), s);
    REQUIRE(carcs.size() == 1);
    CHECK(carcs[0].nodes() == std::vector<int>{0, 1, 2});
}

TEST_CASE("vector JSON accepts both encodings and checks lengths") {
    CHECK(vector_from_json(json::parse("[1.0, 2.0]"), 2) == std::vector<double>{1.0, 2.0});
    CHECK(vector_from_json(json::parse(R"({"values": [3.5]})"), 1) == std::vector<double>{3.5});
    CHECK_THROWS_AS(vector_from_json(json::parse("[1.0]"), 2), Error);
}
