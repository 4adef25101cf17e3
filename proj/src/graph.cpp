#include "edgeimp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "edgeimp/error.hpp"

namespace edgeimp {

namespace {

struct AdjacencyList {
  std::vector<std::size_t> offsets;
  std::vector<NodeIndex> neighbours;
};

// Undirected view of the topology (both directions, self-loops dropped).
AdjacencyList undirected_adjacency(const Snapshot& s) {
  const std::size_t n = s.num_nodes();
  std::vector<std::size_t> count(n + 1, 0);
  for (const auto& e : s.edges()) {
    if (e.key.is_loop()) continue;
    ++count[e.key.i + 1];
    ++count[e.key.j + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  AdjacencyList adj{count, std::vector<NodeIndex>(count.back())};
  std::vector<std::size_t> fill(count.begin(), count.end() - 1);
  for (const auto& e : s.edges()) {
    if (e.key.is_loop()) continue;
    adj.neighbours[fill[e.key.i]++] = e.key.j;
    adj.neighbours[fill[e.key.j]++] = e.key.i;
  }
  return adj;
}

}  // namespace

Snapshot::Snapshot(std::size_t num_nodes, bool directed, std::int64_t timestamp, std::vector<Edge> edges)
    : num_nodes_(num_nodes), directed_(directed), timestamp_(timestamp) {
  for (auto& e : edges) {
    if (e.key.i >= num_nodes || e.key.j >= num_nodes)
      throw DataError("edge endpoint out of range for snapshot with " + std::to_string(num_nodes) + " nodes");
    if (!std::isfinite(e.weight) || e.weight < 0.0)
      throw DataError("edge weight must be finite and non-negative");
    e.key = canonical(e.key.i, e.key.j);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.key < b.key; });
  for (const auto& e : edges) {
    if (!edges_.empty() && edges_.back().key == e.key)
      edges_.back().weight += e.weight;
    else
      edges_.push_back(e);
  }
  origin_.resize(num_nodes);
  std::iota(origin_.begin(), origin_.end(), NodeIndex{0});
}

EdgeKey Snapshot::canonical(NodeIndex a, NodeIndex b) const noexcept {
  if (!directed_ && b < a) return {b, a};
  return {a, b};
}

std::optional<std::size_t> Snapshot::find(EdgeKey key) const {
  key = canonical(key.i, key.j);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key,
                             [](const Edge& e, const EdgeKey& k) { return e.key < k; });
  if (it == edges_.end() || it->key != key) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

std::optional<double> Snapshot::weight(EdgeKey key) const {
  if (auto pos = find(key)) return edges_[*pos].weight;
  return std::nullopt;
}

double Snapshot::total_weight() const noexcept {
  double total = 0.0;
  for (const auto& e : edges_) total += e.weight;
  return total;
}

Snapshot Snapshot::with_weights(std::span<const double> weights) const {
  if (weights.size() != edges_.size()) throw DataError("weight vector does not match edge count");
  Snapshot out = *this;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!std::isfinite(weights[k]) || weights[k] < 0.0)
      throw DataError("edge weight must be finite and non-negative");
    out.edges_[k].weight = weights[k];
  }
  return out;
}

Snapshot Snapshot::with_weight(EdgeKey key, double weight) const {
  auto pos = find(key);
  if (!pos) throw DataError("edge not present in snapshot");
  if (!std::isfinite(weight) || weight < 0.0) throw DataError("edge weight must be finite and non-negative");
  Snapshot out = *this;
  out.edges_[*pos].weight = weight;
  return out;
}

Snapshot Snapshot::with_timestamp(std::int64_t timestamp) const {
  Snapshot out = *this;
  out.timestamp_ = timestamp;
  return out;
}

Snapshot Snapshot::with_origin(std::vector<NodeIndex> origin) const {
  if (origin.size() != num_nodes_) throw DataError("origin map does not match node count");
  Snapshot out = *this;
  out.origin_ = std::move(origin);
  return out;
}

TemporalNetwork::TemporalNetwork(std::vector<std::string> labels, bool directed, std::vector<Snapshot> snapshots,
                                 NetworkMetadata metadata)
    : labels_(std::move(labels)), directed_(directed), snapshots_(std::move(snapshots)),
      metadata_(std::move(metadata)) {
  for (std::size_t t = 0; t < snapshots_.size(); ++t) {
    const auto& s = snapshots_[t];
    if (s.num_nodes() != labels_.size())
      throw DataError("snapshot " + std::to_string(t) + " does not span the node universe");
    if (s.directed() != directed_) throw DataError("snapshot " + std::to_string(t) + " has mismatched directedness");
    if (t > 0 && s.timestamp() <= snapshots_[t - 1].timestamp())
      throw DataError("snapshot timestamps must be strictly increasing");
  }
  std::vector<std::string> sorted = labels_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw DataError("node labels must be unique");
}

TemporalNetwork single_snapshot_network(const Snapshot& s) {
  std::vector<std::string> labels(s.num_nodes());
  for (std::size_t v = 0; v < labels.size(); ++v) labels[v] = std::to_string(v);
  std::vector<NodeIndex> identity(s.num_nodes());
  std::iota(identity.begin(), identity.end(), NodeIndex{0});
  return TemporalNetwork(std::move(labels), s.directed(), {s.with_origin(std::move(identity))});
}

std::vector<std::uint32_t> connected_components(const Snapshot& s) {
  const std::size_t n = s.num_nodes();
  const auto adj = undirected_adjacency(s);
  constexpr auto unset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> comp(n, unset);
  std::uint32_t next = 0;
  std::deque<NodeIndex> queue;
  for (NodeIndex root = 0; root < n; ++root) {
    if (comp[root] != unset) continue;
    comp[root] = next;
    queue.push_back(root);
    while (!queue.empty()) {
      NodeIndex u = queue.front();
      queue.pop_front();
      for (std::size_t k = adj.offsets[u]; k < adj.offsets[u + 1]; ++k) {
        NodeIndex v = adj.neighbours[k];
        if (comp[v] == unset) {
          comp[v] = next;
          queue.push_back(v);
        }
      }
    }
    ++next;
  }
  return comp;
}

bool is_connected(const Snapshot& s) {
  if (s.num_nodes() == 0) return false;
  const auto comp = connected_components(s);
  return std::all_of(comp.begin(), comp.end(), [](std::uint32_t c) { return c == 0; });
}

Snapshot giant_component(const Snapshot& s) {
  if (s.num_edges() == 0) return Snapshot(0, s.directed(), s.timestamp(), {});
  const auto comp = connected_components(s);
  const std::uint32_t num_comp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<std::size_t> size(num_comp, 0);
  for (auto c : comp) ++size[c];
  const auto best = static_cast<std::uint32_t>(std::max_element(size.begin(), size.end()) - size.begin());

  std::vector<NodeIndex> local(s.num_nodes(), 0);
  std::vector<NodeIndex> origin;
  for (NodeIndex v = 0; v < s.num_nodes(); ++v) {
    if (comp[v] != best) continue;
    local[v] = static_cast<NodeIndex>(origin.size());
    origin.push_back(s.origin(v));
  }
  std::vector<Edge> edges;
  for (const auto& e : s.edges()) {
    if (comp[e.key.i] != best) continue;
    edges.push_back({{local[e.key.i], local[e.key.j]}, e.weight});
  }
  const std::size_t m = origin.size();
  return Snapshot(m, s.directed(), s.timestamp(), std::move(edges)).with_origin(std::move(origin));
}

std::vector<NodeDegree> degrees_strengths(const Snapshot& s) {
  std::vector<NodeDegree> out(s.num_nodes());
  for (const auto& e : s.edges()) {
    ++out[e.key.i].degree;
    out[e.key.i].strength += e.weight;
    if (e.key.is_loop()) continue;
    ++out[e.key.j].degree;
    out[e.key.j].strength += e.weight;
  }
  return out;
}

std::vector<double> edge_betweenness(const Snapshot& s) {
  const std::size_t n = s.num_nodes();
  std::vector<double> result(s.num_edges(), 0.0);
  if (n < 2) return result;

  // Out-adjacency with edge positions; undirected edges go both ways.
  std::vector<std::vector<std::pair<NodeIndex, std::size_t>>> out(n);
  const auto edges = s.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    if (e.key.is_loop()) continue;
    out[e.key.i].push_back({e.key.j, k});
    if (!s.directed()) out[e.key.j].push_back({e.key.i, k});
  }

  std::vector<double> sigma(n), delta(n);
  std::vector<long> dist(n);
  std::vector<NodeIndex> order;
  order.reserve(n);
  std::deque<NodeIndex> queue;
  for (NodeIndex src = 0; src < n; ++src) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    order.clear();
    sigma[src] = 1.0;
    dist[src] = 0;
    queue.push_back(src);
    while (!queue.empty()) {
      NodeIndex u = queue.front();
      queue.pop_front();
      order.push_back(u);
      for (auto [v, k] : out[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
        if (dist[v] == dist[u] + 1) sigma[v] += sigma[u];
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      NodeIndex u = *it;
      for (auto [v, k] : out[u]) {
        if (dist[v] != dist[u] + 1) continue;
        double c = sigma[u] / sigma[v] * (1.0 + delta[v]);
        result[k] += c;
        delta[u] += c;
      }
    }
  }
  // Undirected pairs were counted from both endpoints.
  const double pairs = s.directed() ? double(n) * double(n - 1) : double(n) * double(n - 1) / 2.0;
  const double scale = (s.directed() ? 1.0 : 0.5) / pairs;
  for (auto& r : result) r *= scale;
  return result;
}

}  // namespace edgeimp
