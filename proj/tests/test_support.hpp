#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "edgeimp/graph.hpp"

namespace edgeimp::testing {

/// G(n, p) with integer weights in [1, 10], drawn with a private generator so
/// test inputs do not depend on the library's own generators.
inline Snapshot random_graph(std::size_t n, double p, std::uint64_t seed, bool directed = false) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::uniform_int_distribution<int> weight(1, 10);
  std::vector<Edge> edges;
  for (NodeIndex i = 0; i < n; ++i)
    for (NodeIndex j = directed ? 0 : i + 1; j < n; ++j)
      if (i != j && coin(rng)) edges.push_back({{i, j}, static_cast<double>(weight(rng))});
  return Snapshot(n, directed, 0, std::move(edges));
}

/// Random connected graph: a random spanning path plus G(n, p) edges.
inline Snapshot random_connected(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<NodeIndex> order(n);
  for (NodeIndex i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const Snapshot base = random_graph(n, p, seed);
  std::vector<Edge> edges(base.edges().begin(), base.edges().end());
  for (std::size_t k = 0; k + 1 < n; ++k) edges.push_back({{order[k], order[k + 1]}, 1.0});
  return Snapshot(n, false, 0, std::move(edges));
}

inline Eigen::MatrixXd dense(const Snapshot& s) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(s.num_nodes(), s.num_nodes());
  for (const auto& e : s.edges()) {
    a(e.key.i, e.key.j) += e.weight;
    if (!s.directed() && !e.key.is_loop()) a(e.key.j, e.key.i) += e.weight;
  }
  return a;
}

inline double dense_lambda(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  return es.eigenvalues()(a.rows() - 1);
}

inline Snapshot ring(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeIndex i = 0; i < n; ++i) edges.push_back({{i, static_cast<NodeIndex>((i + 1) % n)}, 1.0});
  return Snapshot(n, false, 0, std::move(edges));
}

inline Snapshot complete(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeIndex i = 0; i < n; ++i)
    for (NodeIndex j = i + 1; j < n; ++j) edges.push_back({{i, j}, 1.0});
  return Snapshot(n, false, 0, std::move(edges));
}

}  // namespace edgeimp::testing
