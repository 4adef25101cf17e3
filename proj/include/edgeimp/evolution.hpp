#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "edgeimp/graph.hpp"
#include "edgeimp/spectral.hpp"

namespace edgeimp {

/// Parameters of the Markov edge-evolution model: an edge changes with
/// probability clamp(alpha * l_e^rho, 0, 1); on change its weight is
/// multiplied by (1 + u), u ~ Normal(0, beta * l_e^gamma).
struct EvolutionParams {
  double alpha = 0.0;
  double rho = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  std::optional<double> se_alpha, se_rho, se_beta, se_gamma;
};

/// Throws DataError for non-finite parameters, alpha < 0 or beta < 0.
void validate(const EvolutionParams& p);

/// clamp(alpha * l_e^rho, 0, 1). Throws DataError if l_e <= 0.
double change_probability(double l_e, const EvolutionParams& p);

/// One edge over one transition t -> t+1. Keys are in the network's index space.
struct ChangeRecord {
  std::size_t t = 0;
  EdgeKey key;
  double l_e = 0.0;
  bool changed = false;
  double rel_change = 0.0;  ///< w(t+1)/w(t) - 1; -1 vanished, +inf new
  bool new_edge = false;
  bool vanished_edge = false;

  bool persistent() const { return !new_edge && !vanished_edge; }
};

struct SimulationOptions {
  SolverOptions solver;
  int max_redraws = 100;      ///< redraws of 1+u <= 0 before truncating at the floor
  double floor_factor = 1e-9; ///< weight floor = factor * initial median weight
};

struct StepResult {
  Snapshot next;
  std::vector<ChangeRecord> records;
  std::size_t saturated = 0;  ///< edges whose theta was clamped to 1
  std::size_t redraws = 0;
  std::size_t floored = 0;    ///< draws truncated to the weight floor
};

/// One Markov step. `records` follow the edge order of `s` and carry `t`.
/// Requires an undirected snapshot with all weights > 0.
StepResult simulate_step(const Snapshot& s, const EvolutionParams& p, std::mt19937_64& rng, double weight_floor,
                         std::size_t t = 0, const SimulationOptions& opts = {});

/// Convenience overload seeding a fresh stream from `seed`.
StepResult simulate_step(const Snapshot& s, const EvolutionParams& p, std::uint64_t seed,
                         const SimulationOptions& opts = {});

struct Simulation {
  TemporalNetwork network;
  std::vector<ChangeRecord> records;
  double saturation_fraction = 0.0;
  std::size_t redraws = 0;
  std::size_t floored = 0;
};

/// Runs T steps from s0 with the stream seeded by (seed, chain). Node labels
/// are the decimal indices. A solver failure is rethrown with the step index.
Simulation simulate(const Snapshot& s0, const EvolutionParams& p, std::size_t steps, std::uint64_t seed,
                    std::uint64_t chain = 0, const SimulationOptions& opts = {});

/// Per-chain random stream: seed_seq{seed, chain}.
std::mt19937_64 chain_rng(std::uint64_t seed, std::uint64_t chain);

struct ObservedChanges {
  std::vector<ChangeRecord> records;
  std::size_t transitions = 0;
  std::size_t skipped_transitions = 0;  ///< snapshot t had no edges
  std::size_t new_edges = 0;
  std::size_t vanished_edges = 0;
  std::size_t outside_giant = 0;  ///< edges of snapshot t outside its giant component
};

/// Change records of an undirected network: for each transition, l_e comes
/// from the giant component of snapshot t; edges present at t are classified
/// as changed when |rel_change| > tol; pairs inside the giant component that
/// appear at t+1 are recorded as new edges.
ObservedChanges observe_changes(const TemporalNetwork& net, double tol = 1e-12, const SolverOptions& solver = {});

}  // namespace edgeimp
