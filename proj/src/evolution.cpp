#include "edgeimp/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "edgeimp/error.hpp"
#include "edgeimp/importance.hpp"

namespace edgeimp {

void validate(const EvolutionParams& p) {
  if (!std::isfinite(p.alpha) || !std::isfinite(p.rho) || !std::isfinite(p.beta) || !std::isfinite(p.gamma))
    throw DataError("evolution parameters must be finite");
  if (p.alpha < 0.0) throw DataError("alpha must be non-negative");
  if (p.beta < 0.0) throw DataError("beta must be non-negative");
}

double change_probability(double l_e, const EvolutionParams& p) {
  if (!(l_e > 0.0)) throw DataError("change probability needs l_e > 0");
  if (p.alpha == 0.0) return 0.0;
  return std::clamp(p.alpha * std::pow(l_e, p.rho), 0.0, 1.0);
}

std::mt19937_64 chain_rng(std::uint64_t seed, std::uint64_t chain) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chain), static_cast<std::uint32_t>(chain >> 32)};
  return std::mt19937_64(seq);
}

namespace {

double median_weight(const Snapshot& s) {
  std::vector<double> w;
  for (const auto& e : s.edges()) w.push_back(e.weight);
  if (w.empty()) return 0.0;
  std::sort(w.begin(), w.end());
  const std::size_t n = w.size();
  return n % 2 ? w[n / 2] : 0.5 * (w[n / 2 - 1] + w[n / 2]);
}

}  // namespace

StepResult simulate_step(const Snapshot& s, const EvolutionParams& p, std::mt19937_64& rng, double weight_floor,
                         std::size_t t, const SimulationOptions& opts) {
  validate(p);
  if (s.directed()) throw DataError("the evolution model is defined for undirected snapshots");
  for (const auto& e : s.edges())
    if (!(e.weight > 0.0)) throw DataError("simulation needs strictly positive edge weights");

  const auto ep = leading_eigenpair(s, opts.solver);
  const auto edges = s.edges();
  std::vector<double> weights(edges.size());
  StepResult out{s, {}, 0, 0, 0};
  out.records.reserve(edges.size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    ChangeRecord rec;
    rec.t = t;
    rec.key = e.key;
    if (e.key.is_loop()) {
      // Self-loops carry no l_e and are held fixed.
      weights[k] = e.weight;
      continue;
    }
    rec.l_e = std::max(pair_importance(ep, e.key.i, e.key.j), kImportanceFloor);
    const double theta_raw = p.alpha * std::pow(rec.l_e, p.rho);
    if (theta_raw >= 1.0) ++out.saturated;
    const double theta = std::clamp(theta_raw, 0.0, 1.0);
    const bool change = unit(rng) < theta;
    double w = e.weight;
    if (change) {
      const double sigma = p.beta * std::pow(rec.l_e, p.gamma);
      double factor = 1.0;
      if (sigma > 0.0) {
        std::normal_distribution<double> gauss(0.0, sigma);
        factor = 1.0 + gauss(rng);
        for (int r = 0; r < opts.max_redraws && factor <= 0.0; ++r) {
          ++out.redraws;
          factor = 1.0 + gauss(rng);
        }
      }
      w = e.weight * factor;
      if (!std::isfinite(w))
        throw NumericalError("edge weight diverged at step " + std::to_string(t) + " (change width " +
                             std::to_string(sigma) + ")");
      if (w < weight_floor) {
        w = weight_floor;
        ++out.floored;
      }
    }
    weights[k] = w;
    rec.changed = change;
    rec.rel_change = w / e.weight - 1.0;
    out.records.push_back(rec);
  }
  out.next = s.with_weights(weights).with_timestamp(s.timestamp() + 1);
  return out;
}

StepResult simulate_step(const Snapshot& s, const EvolutionParams& p, std::uint64_t seed,
                         const SimulationOptions& opts) {
  auto rng = chain_rng(seed, 0);
  return simulate_step(s, p, rng, opts.floor_factor * median_weight(s), 0, opts);
}

Simulation simulate(const Snapshot& s0, const EvolutionParams& p, std::size_t steps, std::uint64_t seed,
                    std::uint64_t chain, const SimulationOptions& opts) {
  validate(p);
  auto rng = chain_rng(seed, chain);
  const double floor = opts.floor_factor * median_weight(s0);
  std::vector<Snapshot> snaps{s0};
  std::vector<ChangeRecord> records;
  std::size_t saturated = 0, draws = 0, redraws = 0, floored = 0;
  for (std::size_t t = 0; t < steps; ++t) {
    StepResult step = [&] {
      try {
        return simulate_step(snaps.back(), p, rng, floor, t, opts);
      } catch (const NumericalError& err) {
        throw NumericalError("simulation step " + std::to_string(t) + ": " + err.what());
      }
    }();
    saturated += step.saturated;
    draws += step.records.size();
    redraws += step.redraws;
    floored += step.floored;
    records.insert(records.end(), step.records.begin(), step.records.end());
    snaps.push_back(std::move(step.next));
  }
  std::vector<std::string> labels(s0.num_nodes());
  for (std::size_t v = 0; v < labels.size(); ++v) labels[v] = std::to_string(v);
  Simulation out{TemporalNetwork(std::move(labels), false, std::move(snaps)), std::move(records), 0.0, redraws,
                 floored};
  out.saturation_fraction = draws ? static_cast<double>(saturated) / static_cast<double>(draws) : 0.0;
  return out;
}

ObservedChanges observe_changes(const TemporalNetwork& net, double tol, const SolverOptions& solver) {
  if (net.directed()) throw DataError("change records are defined for undirected networks");
  if (!(tol >= 0.0)) throw DataError("change tolerance must be non-negative");
  ObservedChanges out;
  for (std::size_t t = 0; t + 1 < net.size(); ++t) {
    ++out.transitions;
    const Snapshot& now = net.snapshot(t);
    const Snapshot& next = net.snapshot(t + 1);
    // Zero-weight entries count as absent.
    std::vector<Edge> present;
    for (const auto& e : now.edges())
      if (e.weight > 0.0) present.push_back(e);
    const Snapshot cur(now.num_nodes(), false, now.timestamp(), std::move(present));
    if (cur.num_edges() == 0) {
      ++out.skipped_transitions;
      continue;
    }
    const Snapshot gc = giant_component(cur);
    const auto ep = leading_eigenpair(gc, solver);
    constexpr auto absent = std::numeric_limits<NodeIndex>::max();
    std::vector<NodeIndex> local(cur.num_nodes(), absent);
    for (NodeIndex v = 0; v < gc.num_nodes(); ++v) local[gc.origin(v)] = v;

    auto importance = [&](EdgeKey key) {
      return std::max(pair_importance(ep, local[key.i], local[key.j]), kImportanceFloor);
    };
    for (const auto& e : cur.edges()) {
      if (e.key.is_loop()) continue;
      if (local[e.key.i] == absent || local[e.key.j] == absent) {
        ++out.outside_giant;
        continue;
      }
      ChangeRecord rec;
      rec.t = t;
      rec.key = e.key;
      rec.l_e = importance(e.key);
      const double w_next = next.weight(e.key).value_or(0.0);
      if (w_next <= 0.0) {
        rec.vanished_edge = true;
        rec.changed = true;
        rec.rel_change = -1.0;
        ++out.vanished_edges;
      } else {
        rec.rel_change = w_next / e.weight - 1.0;
        rec.changed = std::abs(rec.rel_change) > tol;
      }
      out.records.push_back(rec);
    }
    for (const auto& e : next.edges()) {
      if (e.key.is_loop() || !(e.weight > 0.0) || cur.find(e.key)) continue;
      if (local[e.key.i] == absent || local[e.key.j] == absent) continue;
      ChangeRecord rec;
      rec.t = t;
      rec.key = e.key;
      rec.l_e = importance(e.key);
      rec.new_edge = true;
      rec.changed = true;
      rec.rel_change = std::numeric_limits<double>::infinity();
      out.records.push_back(rec);
      ++out.new_edges;
    }
  }
  return out;
}

}  // namespace edgeimp
