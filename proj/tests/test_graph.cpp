#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "popproto/graph.hpp"

using namespace popproto;

TEST_CASE("family stats match hand-computed values") {
  auto check = [](const Graph& g, uint64_t m, uint32_t deg, uint32_t diam) {
    GraphStats s = stats(g);
    CHECK(s.m == m);
    CHECK(s.max_degree == deg);
    CHECK(s.diameter == diam);
  };
  check(gen_family(GraphFamily::Ring, 8), 16, 2, 4);
  check(gen_family(GraphFamily::Ring, 5), 10, 2, 2);
  check(gen_family(GraphFamily::Complete, 4), 12, 3, 1);
  check(gen_family(GraphFamily::Complete, 5), 20, 4, 1);
  check(gen_family(GraphFamily::Star, 5), 8, 4, 2);
  check(gen_family(GraphFamily::Star, 6), 10, 5, 2);
  check(gen_family(GraphFamily::Ring, 2), 2, 1, 1);
}

TEST_CASE("ring diameter is floor(n/2)") {
  for (uint32_t n = 3; n <= 32; ++n)
    CHECK(stats(gen_family(GraphFamily::Ring, n)).diameter == n / 2);
}

TEST_CASE("ordered edge list holds both directions exactly once") {
  Graph g = gen_family(GraphFamily::Ring, 4);
  CHECK(g.m() == 8);
  std::set<std::pair<uint32_t, uint32_t>> seen(g.edges.begin(), g.edges.end());
  CHECK(seen.size() == 8);
  for (auto [u, v] : g.edges) {
    CHECK(u != v);
    CHECK(seen.count({v, u}) == 1);
  }
}

TEST_CASE("build_graph applies symmetric closure and drops duplicates") {
  Graph g = build_graph({{0, 1}, {1, 0}, {1, 2}, {1, 2}});
  CHECK(g.n == 3);
  CHECK(g.m() == 4);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
  CHECK(g.has_edge(2, 1));
  CHECK(!g.has_edge(0, 2));
}

TEST_CASE("build_graph rejects bad inputs") {
  CHECK_THROWS_AS(build_graph({{0, 0}}), std::invalid_argument);       // self-loop
  CHECK_THROWS_AS(build_graph({}), std::invalid_argument);             // n < 2
  CHECK_THROWS_AS(build_graph({{0, 1}, {2, 3}}), std::invalid_argument);  // disconnected
  CHECK_THROWS_AS(build_graph({{0, 1}}, 4), std::invalid_argument);    // isolated 2,3
}

TEST_CASE("gnp is deterministic under seed and always connected") {
  Graph a = gen_family(GraphFamily::Gnp, 10, 0.4, 7);
  Graph b = gen_family(GraphFamily::Gnp, 10, 0.4, 7);
  CHECK(a.edges == b.edges);
  Graph c = gen_family(GraphFamily::Gnp, 10, 0.4, 8);
  // Different seeds should give a different draw at this density.
  CHECK(a.edges != c.edges);
  for (uint64_t seed = 0; seed < 30; ++seed) {
    Graph g = gen_family(GraphFamily::Gnp, 9, 0.3, seed);
    GraphStats s = stats(g);
    CHECK(s.n == 9);
    CHECK(s.diameter < 9);  // finite diameter means connected
    uint32_t deg = 0;
    for (uint32_t v = 0; v < g.n; ++v) deg = std::max(deg, g.degree(v));
    CHECK(s.max_degree == deg);
  }
  CHECK(gen_family(GraphFamily::Gnp, 5, 1.0, 3).m() == 20);  // p=1 is complete
  CHECK_THROWS_AS(gen_family(GraphFamily::Gnp, 5, 0.0, 3), std::invalid_argument);
}

TEST_CASE("edge list parsing skips comments and blanks") {
  std::istringstream in("# a triangle\n0 1\n\n  1 2\n2 0\n");
  auto edges = parse_edge_list(in);
  REQUIRE(edges.size() == 3);
  Graph g = build_graph(edges);
  CHECK(g.n == 3);
  CHECK(g.m() == 6);

  std::istringstream bad("0 x\n");
  CHECK_THROWS_AS(parse_edge_list(bad), std::invalid_argument);
  CHECK_THROWS_AS(load_edge_list("/nonexistent/edges.txt"), std::runtime_error);
}
