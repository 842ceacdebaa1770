#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "support.hpp"
#include "tomolab/graph.hpp"

using namespace tomolab;

namespace {

bool symmetric_with_loops(const Graph& g) {
  for (NodeId i = 0; i < g.size(); ++i) {
    if (!g.connected(i, i)) return false;
    for (NodeId j = 0; j < g.size(); ++j)
      if (g.connected(i, j) != g.connected(j, i)) return false;
  }
  return true;
}

double loglog_p(int n) { return (std::log(double(n)) + std::log(std::log(double(n)))) / n; }

}  // namespace

TEST_CASE("NodeSet ordering and validation") {
  const NodeSet s{4, 1, 7};
  CHECK(s.members() == std::vector<NodeId>{1, 4, 7});
  CHECK(s.index_of(7) == 2u);
  CHECK_FALSE(s.index_of(5).has_value());
  CHECK(s.complement(9) == NodeSet{0, 2, 3, 5, 6, 8});
  CHECK(s.set_union(NodeSet{2}) == NodeSet{1, 2, 4, 7});
  CHECK(s.set_difference(NodeSet{4}) == NodeSet{1, 7});
  CHECK(s.disjoint_with(NodeSet{0, 2}));
  CHECK_THROWS_AS(NodeSet({1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(NodeSet({-1}), std::invalid_argument);
  CHECK_THROWS_AS(s.check_within(7), std::invalid_argument);
  CHECK(NodeSet::range(2, 5) == NodeSet{2, 3, 4});
}

TEST_CASE("sample_er extremes and invariants") {
  std::mt19937_64 rng(11);
  const Graph empty = sample_er(3, 0.0, rng);
  CHECK(empty.edge_count() == 0);
  CHECK(empty == Graph(3));
  CHECK(sample_er(3, 1.0, rng) == Graph::complete(3));
  CHECK_THROWS_AS(sample_er(3, 1.5, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_er(0, 0.5, rng), std::invalid_argument);

  for (int t = 0; t < 20; ++t) CHECK(symmetric_with_loops(sample_er(30, 0.2, rng)));

  std::mt19937_64 r1(5), r2(5);
  CHECK(sample_er(50, 0.1, r1) == sample_er(50, 0.1, r2));
}

TEST_CASE("sample_er edge density matches p") {
  std::mt19937_64 rng(3);
  const int n = 400;
  const double p = 0.05;
  const Graph g = sample_er(n, p, rng);
  const double pairs = n * (n - 1) / 2.0;
  const double sigma = std::sqrt(pairs * p * (1 - p));
  CHECK(std::abs(double(g.edge_count()) - pairs * p) < 4 * sigma);
}

TEST_CASE("connectivity near the threshold follows the no-isolated-node law") {
  // 200 graphs at N = 1000, p = (log N + log log N) / N. The limit law gives
  // P[connected] ~ exp(-N (1-p)^(N-1)) ~ 0.87; check agreement to 4 sigma.
  const int n = 1000;
  const double p = loglog_p(n);
  const int trials = 200;
  int connected = 0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(1000 + t);
    connected += is_connected(sample_er(n, p, rng));
  }
  const double expected = oracle::no_isolated_probability(n, p);
  const double sigma = std::sqrt(expected * (1 - expected) / trials);
  const double frac = double(connected) / trials;
  INFO("fraction connected = " << frac << ", limit law = " << expected);
  CHECK(std::abs(frac - expected) <= 4 * sigma);
}

// The stated >= 0.9 target sits above the ~0.87 limit probability, so this
// check is kept as stated and allowed to fail.
TEST_CASE("connected fraction at the log+loglog threshold reaches 0.9" * doctest::may_fail()) {
  const int n = 1000;
  const double p = loglog_p(n);
  int pure = 0, partial = 0;
  for (int t = 0; t < 200; ++t) {
    std::mt19937_64 rng(7000 + t);
    pure += is_connected(sample_er(n, p, rng));
    const Graph inner = sample_er(10, 0.3, rng);
    partial += is_connected(sample_partial_er({n, p, NodeSet::range(10), inner}, rng));
  }
  INFO("pure " << pure / 200.0 << ", partial " << partial / 200.0);
  CHECK(pure / 200.0 >= 0.9);
  CHECK(partial / 200.0 >= 0.9);
}

TEST_CASE("sample_partial_er keeps the observable block fixed") {
  SUBCASE("S = all nodes reproduces the embedded graph") {
    std::mt19937_64 rng(2);
    const Graph inner = sample_er(8, 0.5, rng);
    CHECK(sample_partial_er({8, 0.3, NodeSet::range(8), inner}, rng) == inner);
  }
  SUBCASE("empty block with p = 1 is complete outside S") {
    std::mt19937_64 rng(2);
    const NodeSet s{1, 3};
    const Graph g = sample_partial_er({5, 1.0, s, Graph(2)}, rng);
    for (NodeId i = 0; i < 5; ++i)
      for (NodeId j = i + 1; j < 5; ++j) CHECK(g.connected(i, j) == !(s.contains(i) && s.contains(j)));
  }
  SUBCASE("ring block survives at N = 500 for 100 seeds") {
    const int n = 500;
    const Graph ring = Graph::ring(10);
    const NodeSet s = NodeSet::range(10);
    for (int seed = 0; seed < 100; ++seed) {
      std::mt19937_64 rng(seed);
      const Graph g = sample_partial_er({n, std::log(double(n)) / n, s, ring}, rng);
      REQUIRE(g.induced(s) == ring);
    }
  }
  SUBCASE("spec validation") {
    std::mt19937_64 rng(2);
    CHECK_THROWS_AS(sample_partial_er({5, 0.5, NodeSet{0, 1}, Graph(3)}, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_partial_er({5, 0.5, NodeSet{0, 7}, Graph(2)}, rng), std::invalid_argument);
  }
}

TEST_CASE("embed") {
  SUBCASE("empty inner into complete outer") {
    const Graph g = embed(Graph(2), Graph::complete(3), NodeSet{0, 1});
    CHECK(g == Graph::from_edges(3, {{0, 2}, {1, 2}}));
  }
  SUBCASE("single inner edge into edgeless outer") {
    const Graph g = embed(Graph::from_edges(2, {{0, 1}}), Graph(3), NodeSet{0, 1});
    CHECK(g == Graph::from_edges(3, {{0, 1}}));
  }
  SUBCASE("result ignores the outer graph inside S") {
    std::mt19937_64 rng(9);
    const NodeSet s{2, 5, 6, 9};
    for (int t = 0; t < 50; ++t) {
      const Graph inner = sample_er(4, 0.5, rng);
      Graph outer1 = sample_er(12, 0.4, rng);
      Graph outer2 = outer1;
      for (NodeId a : s)
        for (NodeId b : s)
          if (a < b) outer2.set_edge(a, b, std::bernoulli_distribution(0.5)(rng));
      CHECK(embed(inner, outer1, s) == embed(inner, outer2, s));
      CHECK(embed(inner, outer1, s).induced(s) == inner);
    }
  }
}

TEST_CASE("local_disconnect") {
  CHECK(local_disconnect(Graph::complete(3), NodeSet{0, 1}, NodeSet{0, 1}) ==
        Graph::from_edges(3, {{0, 2}, {1, 2}}));
  const Graph g = Graph::from_edges(5, {{0, 1}, {2, 3}, {3, 4}});
  CHECK(local_disconnect(g, NodeSet{0, 1}, NodeSet{3, 4}) == g);
  CHECK(local_disconnect(g, NodeSet{0}, NodeSet{0}) == g);
  CHECK(local_disconnect(g, NodeSet{0}, NodeSet{1}) == Graph::from_edges(5, {{2, 3}, {3, 4}}));
}

TEST_CASE("inherit") {
  SUBCASE("worked example") {
    const Graph g = Graph::from_edges(5, {{1, 4}, {2, 0}, {1, 2}, {3, 4}});
    CHECK(inherit(g, 3, NodeSet{1, 2}) == Graph::from_edges(5, {{3, 4}, {3, 0}}));
  }
  SUBCASE("no external edges only drops internal ones") {
    const Graph g = Graph::from_edges(5, {{1, 2}, {3, 4}});
    CHECK(inherit(g, 0, NodeSet{1, 2}) == Graph::from_edges(5, {{3, 4}}));
  }
  SUBCASE("receiver inside the set is rejected") {
    CHECK_THROWS_AS(inherit(Graph(4), 1, NodeSet{1, 2}), std::invalid_argument);
  }
}

TEST_CASE("homogenization contracts distances and keeps second neighbors") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 200; ++t) {
    const int n = std::uniform_int_distribution<int>(15, 40)(rng);
    const int s_size = std::uniform_int_distribution<int>(3, 8)(rng);
    const NodeSet s = NodeSet::range(s_size);
    Graph inner = sample_er(s_size, 0.4, rng);
    inner.set_edge(0, 1, false);
    const Graph g = sample_partial_er({n, 3.0 / n, s, inner}, rng);
    const Graph ref = local_disconnect(g, s, s);
    const Graph bar = homogenize(g, s, 0, 1);
    const NodeSet hidden = s.complement(n);
    const auto d_ref = oracle::power_distances(testing::to_bool_matrix(ref));
    const auto d_bar = oracle::power_distances(testing::to_bool_matrix(bar));
    for (NodeId l : hidden)
      for (NodeId m : hidden) {
        if (d_ref(l, m) >= 0) REQUIRE((d_bar(l, m) >= 0 && d_bar(l, m) <= d_ref(l, m)));
      }
    const NodeSet second = neighborhood(g, 1, 2);
    const NodeSet second_bar = neighborhood(bar, 1, 2);
    for (NodeId m : second)
      if (hidden.contains(m)) REQUIRE(second_bar.contains(m));
  }
}

TEST_CASE("distance and neighborhood") {
  const Graph path = Graph::path(3);
  CHECK(distance(path, 0, 2) == 2);
  CHECK(distance(path, 1, 1) == 0);
  CHECK(distance(Graph(2), 0, 1) == kUnreachable);
  CHECK(neighborhood(path, 0, 0) == NodeSet{0});
  CHECK(neighborhood(Graph::star(6), 0, 1) == NodeSet::range(6));
  CHECK(neighborhood(Graph::star(6), 1, 1) == NodeSet{0, 1});
  CHECK_THROWS_AS(neighborhood(path, 0, -1), std::invalid_argument);
}

TEST_CASE("BFS agrees with boolean matrix powers") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 60; ++t) {
    const int n = std::uniform_int_distribution<int>(1, 20)(rng);
    const Graph g = sample_er(n, std::uniform_real_distribution<double>(0.0, 0.4)(rng), rng);
    const auto dist = oracle::power_distances(testing::to_bool_matrix(g));
    for (NodeId i = 0; i < n; ++i) {
      const auto row = distances_from(g, i);
      for (NodeId j = 0; j < n; ++j) {
        const Hops d = distance(g, i, j);
        REQUIRE(d.has_value() == (dist(i, j) >= 0));
        if (d) REQUIRE(*d == dist(i, j));
        REQUIRE(row[j] == d);
      }
      for (int r = 0; r <= 3; ++r) {
        std::vector<NodeId> expect;
        for (NodeId j = 0; j < n; ++j)
          if (dist(i, j) >= 0 && dist(i, j) <= r) expect.push_back(j);
        REQUIRE(neighborhood(g, i, r) == NodeSet(expect));
      }
    }
  }
}

TEST_CASE("degrees and connectivity") {
  const Graph k4 = Graph::complete(4);
  CHECK(is_connected(k4));
  CHECK(k4.max_degree() == 4);
  CHECK(k4.degree(0) == 4);
  CHECK_FALSE(is_connected(Graph(2)));
  CHECK(is_connected(Graph(1)));
  CHECK(Graph::star(5).max_degree() == 5);
  CHECK(Graph::star(5).degree(3) == 2);
}

TEST_CASE("edge list round trip and diagnostics") {
  std::mt19937_64 rng(4);
  const Graph g = sample_er(25, 0.2, rng);
  std::stringstream buf;
  write_edge_list(buf, g);
  CHECK(read_edge_list(buf) == g);

  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_edge_list(in);
  };
  CHECK(parse("n=3\n# comment\n0 2\n\n") == Graph::from_edges(3, {{0, 2}}));
  CHECK_THROWS_WITH_AS(parse("n=3\n0 5\n"), doctest::Contains("line 2"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse("0 1\n"), doctest::Contains("line 1"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse("n=3\n0 1 x\n"), doctest::Contains("line 2"), std::invalid_argument);
  CHECK_THROWS_AS(parse(""), std::invalid_argument);
}
