#include "edgeimp/importance.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "edgeimp/error.hpp"

namespace edgeimp {

double EdgeImportance::log_value() const { return std::log(std::max(value, kImportanceFloor)); }

const EdgeImportance* ImportanceMap::find(EdgeKey key) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), key,
                             [](const EdgeImportance& e, const EdgeKey& k) { return e.key < k; });
  if (it == entries.end() || it->key != key) return nullptr;
  return &*it;
}

std::size_t ImportanceMap::floored_count() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](auto& e) { return e.floored; }));
}

double pair_importance(const EigenPair& ep, NodeIndex i, NodeIndex j) {
  return 2.0 * ep.vector.at(i) * ep.vector.at(j);
}

namespace {

EdgeImportance make_entry(const EigenPair& ep, EdgeKey key) {
  double v = pair_importance(ep, key.i, key.j);
  // The Perron vector is non-negative; anything at or below zero is round-off.
  if (v <= kImportanceFloor) return {key, kImportanceFloor, true};
  return {key, v, false};
}

}  // namespace

ImportanceMap edge_importance(const EigenPair& ep, const Snapshot& s, const ImportanceOptions& opts) {
  if (s.directed()) throw DataError("edge_importance requires an undirected snapshot; use edge_importance_directed");
  if (ep.vector.size() != s.num_nodes())
    throw DataError("eigenvector length " + std::to_string(ep.vector.size()) + " does not match snapshot with " +
                    std::to_string(s.num_nodes()) + " nodes");
  ImportanceMap out;
  out.timestamp = s.timestamp();
  if (opts.all_pairs) {
    const auto n = static_cast<NodeIndex>(s.num_nodes());
    out.entries.reserve(std::size_t(n) * (n - 1) / 2);
    for (NodeIndex i = 0; i < n; ++i)
      for (NodeIndex j = i + 1; j < n; ++j) out.entries.push_back(make_entry(ep, {i, j}));
    return out;
  }
  out.entries.reserve(s.num_edges());
  for (const auto& e : s.edges()) {
    if (e.key.is_loop()) continue;
    out.entries.push_back(make_entry(ep, e.key));
  }
  return out;
}

std::vector<DirectedImportance> edge_importance_directed(const SingularTriple& st, const Snapshot& s) {
  if (!(st.value > 0.0)) throw DataError("leading singular value is zero (null network)");
  if (st.m_vector.size() != s.num_nodes()) throw DataError("singular vector does not match snapshot");
  // M_ij != 0 iff i and j share an out-neighbour k (A_ik, A_jk > 0).
  std::vector<std::vector<NodeIndex>> in(s.num_nodes());
  for (const auto& e : s.edges()) {
    if (e.weight <= 0.0) continue;
    in[e.key.j].push_back(e.key.i);
    if (!s.directed() && !e.key.is_loop()) in[e.key.i].push_back(e.key.j);
  }
  std::set<EdgeKey> pattern;
  for (auto& sources : in) {
    std::sort(sources.begin(), sources.end());
    for (std::size_t a = 0; a < sources.size(); ++a)
      for (std::size_t b = a; b < sources.size(); ++b) pattern.insert({sources[a], sources[b]});
  }
  std::vector<DirectedImportance> out;
  out.reserve(pattern.size());
  const auto& v = st.m_vector;
  for (const auto& key : pattern) out.push_back({key, v[key.i] * v[key.j] / (2.0 * st.value)});
  return out;
}

DeltaLambdaEstimate delta_lambda_approx(const ImportanceMap& imp, std::span<const EdgeChange> changes) {
  DeltaLambdaEstimate out;
  out.contributions.reserve(changes.size());
  for (const auto& c : changes) {
    const EdgeKey key = c.key.i <= c.key.j ? c.key : EdgeKey{c.key.j, c.key.i};
    const auto* entry = imp.find(key);
    if (!entry) throw DataError("changed edge (" + std::to_string(key.i) + "," + std::to_string(key.j) +
                                ") has no importance entry");
    const double contribution = entry->value * c.delta;
    out.contributions.push_back(contribution);
    out.predicted += contribution;
  }
  return out;
}

DeltaLambdaEstimate delta_lambda_approx(const ImportanceMap& imp, std::span<const EdgeChange> changes,
                                        double base_lambda, const Snapshot& next, const SolverOptions& opts) {
  auto out = delta_lambda_approx(imp, changes);
  out.actual = leading_eigenpair(next, opts).lambda - base_lambda;
  return out;
}

double finite_difference_le(const Snapshot& s, EdgeKey e, double h, const SolverOptions& opts) {
  if (!(h > 0.0)) throw DataError("finite difference step must be positive");
  auto w = s.weight(e);
  if (!w) throw DataError("edge not present in snapshot");
  if (*w - h <= 0.0) throw DataError("finite difference step would make the edge weight non-positive");
  const double up = leading_eigenpair(s.with_weight(e, *w + h), opts).lambda;
  const double down = leading_eigenpair(s.with_weight(e, *w - h), opts).lambda;
  return (up - down) / (2.0 * h);
}

}  // namespace edgeimp
