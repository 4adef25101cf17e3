#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace edgeimp {

using NodeIndex = std::uint32_t;

/// Ordered node pair. Undirected snapshots store it canonically with i <= j.
struct EdgeKey {
  NodeIndex i = 0;
  NodeIndex j = 0;

  bool is_loop() const noexcept { return i == j; }
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

struct Edge {
  EdgeKey key;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// An immutable weighted graph on nodes 0..n-1.
///
/// Edges are kept sorted by key. `origin()` maps each local node to its index
/// in the parent node universe, so a giant-component view keeps its labels.
class Snapshot {
 public:
  Snapshot() = default;

  /// Duplicate keys are merged by summing weights; undirected keys are
  /// canonicalised first. Throws DataError on negative or non-finite weights
  /// or out-of-range endpoints.
  Snapshot(std::size_t num_nodes, bool directed, std::int64_t timestamp, std::vector<Edge> edges);

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  bool directed() const noexcept { return directed_; }
  std::int64_t timestamp() const noexcept { return timestamp_; }
  bool empty() const noexcept { return num_nodes_ == 0; }

  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const NodeIndex> origin() const noexcept { return origin_; }
  NodeIndex origin(NodeIndex local) const { return origin_.at(local); }

  EdgeKey canonical(NodeIndex a, NodeIndex b) const noexcept;
  /// Position of the edge in edges(), if present.
  std::optional<std::size_t> find(EdgeKey key) const;
  std::optional<double> weight(EdgeKey key) const;
  double total_weight() const noexcept;

  /// Same topology with replaced weights (one per edge, in edges() order).
  Snapshot with_weights(std::span<const double> weights) const;
  Snapshot with_weight(EdgeKey key, double weight) const;
  Snapshot with_timestamp(std::int64_t timestamp) const;
  /// Re-labels the local->parent mapping (used when building views).
  Snapshot with_origin(std::vector<NodeIndex> origin) const;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;

 private:
  std::size_t num_nodes_ = 0;
  bool directed_ = false;
  std::int64_t timestamp_ = 0;
  std::vector<Edge> edges_;
  std::vector<NodeIndex> origin_;
};

/// Metadata recorded at ingestion; original time values are kept here since
/// snapshot timestamps are window ordinals.
struct NetworkMetadata {
  std::string time_format = "int";
  std::int64_t time_origin = 0;
  std::int64_t window = 1;
  std::string weight_mode = "sum";
  std::map<std::string, std::string> extra;

  friend bool operator==(const NetworkMetadata&, const NetworkMetadata&) = default;
};

/// Ordered sequence of snapshots sharing one node universe.
class TemporalNetwork {
 public:
  TemporalNetwork() = default;
  /// Throws DataError unless timestamps strictly increase and every snapshot
  /// spans the full label table with matching directedness.
  TemporalNetwork(std::vector<std::string> labels, bool directed, std::vector<Snapshot> snapshots,
                  NetworkMetadata metadata = {});

  std::span<const std::string> labels() const noexcept { return labels_; }
  const std::string& label(NodeIndex index) const { return labels_.at(index); }
  bool directed() const noexcept { return directed_; }
  std::span<const Snapshot> snapshots() const noexcept { return snapshots_; }
  const Snapshot& snapshot(std::size_t t) const { return snapshots_.at(t); }
  std::size_t size() const noexcept { return snapshots_.size(); }
  std::size_t num_nodes() const noexcept { return labels_.size(); }
  const NetworkMetadata& metadata() const noexcept { return metadata_; }

  friend bool operator==(const TemporalNetwork&, const TemporalNetwork&) = default;

 private:
  std::vector<std::string> labels_;
  bool directed_ = false;
  std::vector<Snapshot> snapshots_;
  NetworkMetadata metadata_;
};

/// Wraps a single snapshot as a one-step network with numeric labels.
TemporalNetwork single_snapshot_network(const Snapshot& s);

/// Induced subgraph on the largest connected component (weak connectivity for
/// directed graphs). Ties go to the component holding the smallest node index.
/// A snapshot without edges yields an empty snapshot.
Snapshot giant_component(const Snapshot& s);

/// Component id per node; ids are assigned in order of smallest member.
std::vector<std::uint32_t> connected_components(const Snapshot& s);
bool is_connected(const Snapshot& s);

struct NodeDegree {
  std::size_t degree = 0;
  double strength = 0.0;
};

/// Degree and strength per node (in + out for directed snapshots). A self-loop
/// counts once toward both.
std::vector<NodeDegree> degrees_strengths(const Snapshot& s);

/// Hop-count shortest-path edge betweenness (Brandes), weights ignored, each
/// value divided by the number of node pairs. Values follow edges() order.
std::vector<double> edge_betweenness(const Snapshot& s);

}  // namespace edgeimp
