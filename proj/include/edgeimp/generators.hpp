#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "edgeimp/graph.hpp"
#include "edgeimp/kernels.hpp"
#include "edgeimp/spectral.hpp"

namespace edgeimp {

/// Two K_clique_size joined through a path of bridge_length nodes.
struct Barbell {
  std::size_t clique_size = 5;
  std::size_t bridge_length = 0;
};
struct Ring {
  std::size_t n = 3;
};
struct ErdosRenyi {
  std::size_t n = 2;
  double p = 0.5;
};
using GraphKind = std::variant<Barbell, Ring, ErdosRenyi>;

struct UnitWeights {};
/// Independent integer weights drawn uniformly from [lo, hi].
struct UniformIntWeights {
  int lo = 1;
  int hi = 10;
};
using WeightScheme = std::variant<UnitWeights, UniformIntWeights>;

struct GeneratorSpec {
  GraphKind kind = Ring{};
  WeightScheme weights = UnitWeights{};
  std::uint64_t seed = 0;
};

/// Parses "barbell:5:3", "ring:10", "er:30:0.2" and weight schemes "unit", "int:1:10".
GraphKind parse_graph_kind(const std::string& text);
WeightScheme parse_weight_scheme(const std::string& text);
std::string to_string(const GraphKind& kind);
std::string to_string(const WeightScheme& weights);

inline constexpr int kMaxConnectAttempts = 1000;

struct GeneratedGraph {
  Snapshot graph;
  int attempts = 1;  ///< Erdos-Renyi draws until a connected one appeared
};

/// Deterministic per seed. Erdos-Renyi graphs are redrawn until connected;
/// throws DataError after kMaxConnectAttempts.
GeneratedGraph generate(const GeneratorSpec& spec);

/// True for edges with both endpoints in the same clique of barbell(clique_size, *).
bool is_barbell_clique_edge(const Barbell& b, EdgeKey key);

enum class PerturbationMode { single, dual };

struct PerturbationOptions {
  PerturbationMode mode = PerturbationMode::single;
  std::vector<double> grid;     ///< must be symmetric about 0
  bool relative = true;         ///< grid values are fractions of the current weight
  std::vector<EdgeKey> edges;   ///< empty: every non-loop edge
  std::uint64_t seed = 0;       ///< partner selection in dual mode
  SolverOptions solver;
  Exec exec = Exec::parallel;
};

/// Symmetric grid of `points` values over [-max_abs, max_abs].
std::vector<double> symmetric_grid(double max_abs, std::size_t points);

struct PerturbationPoint {
  EdgeKey edge;
  double delta_a = 0.0;       ///< grid value as given
  double delta_weight = 0.0;  ///< absolute weight change applied
  double l_e = 0.0;
  double actual = 0.0;        ///< lambda(perturbed) - lambda(base)
  double predicted = 0.0;     ///< l_e * delta_weight
  // Dual mode only.
  EdgeKey partner{};
  double partner_delta_a = 0.0;
  double partner_l_e = 0.0;
  bool observed_larger = false;

  /// |predicted - actual| / |actual|; NaN when actual is zero.
  double relative_error() const;
};

struct PerturbationExperiment {
  Snapshot base;
  double base_lambda = 0.0;
  PerturbationOptions options;
  std::vector<PerturbationPoint> results;  ///< edge-major, grid-minor
};

/// Applies every grid value to every selected edge (both matrix entries) and
/// recomputes lambda exactly. Throws DataError for a disconnected base, an
/// asymmetric grid, or a perturbation that would leave a non-positive weight.
PerturbationExperiment run_perturbation(const Snapshot& base, const PerturbationOptions& opts);

}  // namespace edgeimp
