#include "doctest.h"
#include "shapdag/error.hpp"
#include "shapdag/graph.hpp"

using namespace shapdag;

TEST_CASE("make_dag validates acyclicity and self-loops") {
    CHECK_NOTHROW(make_dag({"a", "b", "c"}, {{0, 1}, {1, 2}}));
    CHECK_THROWS_AS(make_dag({"a", "b"}, {{0, 1}, {1, 0}}), InputError);
    CHECK_THROWS_AS(make_dag({"a", "b"}, {{0, 0}}), InputError);
    CHECK_THROWS_AS(make_dag({"a", "b", "c"}, {{0, 1}, {1, 2}, {2, 0}}), InputError);
}

TEST_CASE("topological sort respects edges") {
    const Dag g = make_dag({"a", "b", "c", "d"}, {{2, 0}, {0, 1}, {2, 3}});
    const auto order = topological_sort(g);
    REQUIRE(order.has_value());
    std::vector<int> pos(4);
    for (int i = 0; i < 4; ++i) pos[(*order)[i]] = i;
    for (const auto& [from, to] : g.edges) CHECK(pos[from] < pos[to]);
}

TEST_CASE("descendants and ancestors") {
    const Dag g = make_dag({"a", "b", "c", "d"}, {{0, 1}, {1, 2}, {3, 2}});
    CHECK(descendants(g, 0) == std::set<int>{1, 2});
    CHECK(descendants(g, 2).empty());
    CHECK(ancestors(g, 2) == std::set<int>{0, 1, 3});
    CHECK(ancestors(g, 0).empty());
}

TEST_CASE("edge list round trip keeps isolated nodes") {
    const Dag g = make_dag({"x", "isolated", "y"}, {{0, 2}});
    const Dag back = parse_edge_list(to_edge_list(g));
    CHECK(back.nodes == g.nodes);
    CHECK(back.edges == g.edges);
}

TEST_CASE("edge list parser handles plain pair lines") {
    const Dag g = parse_edge_list("a b\nb c\n");
    CHECK(g.nodes.size() == 3);
    CHECK(g.edges.size() == 2);
    CHECK(g.has_edge(g.node_index("a"), g.node_index("b")));
    CHECK_THROWS_AS(parse_edge_list("a b c\n"), InputError);
}

TEST_CASE("dot output lists nodes and edges") {
    const Dag g = make_dag({"a", "b"}, {{0, 1}});
    const std::string dot = to_dot(g);
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("\"a\" -> \"b\"") != std::string::npos);
}
