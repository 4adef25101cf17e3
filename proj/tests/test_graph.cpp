#include <queue>

#include "doctest.h"
#include "edgeimp/error.hpp"
#include "edgeimp/graph.hpp"
#include "test_support.hpp"

using namespace edgeimp;
using edgeimp::testing::random_graph;

namespace {

std::vector<std::vector<int>> all_pairs_hops(const Snapshot& s) {
  const std::size_t n = s.num_nodes();
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
  const auto a = edgeimp::testing::dense(s);
  for (std::size_t src = 0; src < n; ++src) {
    std::queue<std::size_t> q;
    q.push(src);
    dist[src][src] = 0;
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (std::size_t v = 0; v < n; ++v)
        if (a(u, v) != 0.0 && dist[src][v] < 0) {
          dist[src][v] = dist[src][u] + 1;
          q.push(v);
        }
    }
  }
  return dist;
}

// Number of shortest paths between every pair, by dynamic programming over distance.
std::vector<std::vector<double>> path_counts(const Snapshot& s, const std::vector<std::vector<int>>& dist) {
  const std::size_t n = s.num_nodes();
  const auto a = edgeimp::testing::dense(s);
  std::vector<std::vector<double>> sigma(n, std::vector<double>(n, 0.0));
  for (std::size_t src = 0; src < n; ++src) {
    sigma[src][src] = 1.0;
    for (int d = 1; d < static_cast<int>(n); ++d)
      for (std::size_t v = 0; v < n; ++v)
        if (dist[src][v] == d)
          for (std::size_t u = 0; u < n; ++u)
            if (a(u, v) != 0.0 && dist[src][u] == d - 1) sigma[src][v] += sigma[src][u];
  }
  return sigma;
}

}  // namespace

TEST_CASE("snapshot canonicalises undirected keys and merges duplicates") {
  Snapshot s(3, false, 7, {{{2, 0}, 1.5}, {{0, 2}, 2.0}, {{1, 2}, 1.0}});
  CHECK(s.num_edges() == 2);
  CHECK(s.weight({0, 2}).value() == doctest::Approx(3.5));
  CHECK(s.find({0, 2}).has_value());
  CHECK(s.find({2, 0}) == s.find({0, 2}));
  CHECK(s.canonical(2, 1) == EdgeKey{1, 2});
  CHECK(s.timestamp() == 7);
  CHECK(s.total_weight() == doctest::Approx(4.5));
}

TEST_CASE("directed snapshots keep orientation") {
  Snapshot s(3, true, 0, {{{2, 0}, 1.0}, {{0, 2}, 2.0}});
  CHECK(s.num_edges() == 2);
  CHECK(s.weight({2, 0}).value() == 1.0);
  CHECK(s.canonical(2, 0) == EdgeKey{2, 0});
}

TEST_CASE("snapshot rejects invalid weights and endpoints") {
  CHECK_THROWS_AS(Snapshot(2, false, 0, {{{0, 1}, -1.0}}), DataError);
  CHECK_THROWS_AS(Snapshot(2, false, 0, {{{0, 1}, std::nan("")}}), DataError);
  CHECK_THROWS_AS(Snapshot(2, false, 0, {{{0, 5}, 1.0}}), DataError);
}

TEST_CASE("with_weights replaces weights in edge order") {
  Snapshot s(3, false, 0, {{{0, 1}, 1.0}, {{1, 2}, 1.0}});
  const std::vector<double> w{4.0, 5.0};
  const auto t = s.with_weights(w);
  CHECK(t.weight({0, 1}).value() == 4.0);
  CHECK(t.weight({1, 2}).value() == 5.0);
  CHECK(s.with_weight({1, 2}, 9.0).weight({1, 2}).value() == 9.0);
  CHECK_THROWS_AS(s.with_weights(std::vector<double>{1.0}), DataError);
}

TEST_CASE("temporal network validates its snapshots") {
  Snapshot a(2, false, 0, {{{0, 1}, 1.0}});
  Snapshot b(2, false, 1, {{{0, 1}, 2.0}});
  CHECK_NOTHROW(TemporalNetwork({"x", "y"}, false, {a, b}));
  CHECK_THROWS_AS(TemporalNetwork({"x", "y"}, false, {b, a}), DataError);
  CHECK_THROWS_AS(TemporalNetwork({"x", "x"}, false, {a}), DataError);
  CHECK_THROWS_AS(TemporalNetwork({"x"}, false, {a}), DataError);
  CHECK_THROWS_AS(TemporalNetwork({"x", "y"}, true, {a}), DataError);
}

TEST_CASE("connected components agree with breadth-first search") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = random_graph(25, 0.06, seed);
    const auto comp = connected_components(s);
    const auto dist = all_pairs_hops(s);
    for (std::size_t u = 0; u < 25; ++u)
      for (std::size_t v = 0; v < 25; ++v) CHECK((comp[u] == comp[v]) == (dist[u][v] >= 0));
    CHECK(is_connected(s) == (*std::max_element(comp.begin(), comp.end()) == 0));
  }
}

TEST_CASE("giant component keeps the largest component and its origins") {
  // Components {0,1} and {2,3,4}; isolated node 5.
  Snapshot s(6, false, 3, {{{0, 1}, 1.0}, {{2, 3}, 2.0}, {{3, 4}, 1.0}});
  const auto g = giant_component(s);
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 2);
  CHECK(g.timestamp() == 3);
  CHECK(g.origin(0) == 2);
  CHECK(g.origin(2) == 4);
  CHECK(g.weight({0, 1}).value() == 2.0);

  // Ties go to the component holding the smallest index.
  Snapshot tie(4, false, 0, {{{2, 3}, 1.0}, {{0, 1}, 1.0}});
  CHECK(giant_component(tie).origin(0) == 0);
  CHECK(giant_component(Snapshot(3, false, 0, {})).num_nodes() == 0);
}

TEST_CASE("degrees and strengths") {
  Snapshot s(3, false, 0, {{{0, 1}, 2.0}, {{0, 2}, 3.0}, {{1, 1}, 5.0}});
  const auto d = degrees_strengths(s);
  CHECK(d[0].degree == 2);
  CHECK(d[0].strength == 5.0);
  CHECK(d[1].degree == 2);
  CHECK(d[1].strength == 7.0);
  CHECK(d[2].degree == 1);
}

TEST_CASE("edge betweenness matches a brute-force path count") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto s = edgeimp::testing::random_connected(14, 0.15, seed);
    const auto dist = all_pairs_hops(s);
    const auto sigma = path_counts(s, dist);
    const std::size_t n = s.num_nodes();
    const auto bc = edge_betweenness(s);
    REQUIRE(bc.size() == s.num_edges());
    for (std::size_t k = 0; k < s.num_edges(); ++k) {
      const auto [u, v] = s.edges()[k].key;
      double expected = 0.0;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
          double through = 0.0;
          if (dist[a][u] + 1 + dist[v][b] == dist[a][b]) through += sigma[a][u] * sigma[v][b];
          if (dist[a][v] + 1 + dist[u][b] == dist[a][b]) through += sigma[a][v] * sigma[u][b];
          expected += through / sigma[a][b];
        }
      expected /= double(n) * double(n - 1) / 2.0;
      CHECK(bc[k] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}
