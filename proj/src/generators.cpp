#include "edgeimp/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "edgeimp/error.hpp"
#include "edgeimp/importance.hpp"

namespace edgeimp {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

std::size_t to_size(const std::string& s, const std::string& ctx) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size() || v < 0) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw DataError("invalid integer '" + s + "' in " + ctx);
  }
}

double to_double(const std::string& s, const std::string& ctx) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("invalid number '" + s + "' in " + ctx);
  }
}

std::vector<Edge> topology(const GraphKind& kind, std::mt19937_64& rng, std::size_t& n) {
  std::vector<Edge> edges;
  if (const auto* b = std::get_if<Barbell>(&kind)) {
    const std::size_t m = b->clique_size;
    const std::size_t k = b->bridge_length;
    n = 2 * m + k;
    auto clique = [&](std::size_t first) {
      for (std::size_t i = first; i < first + m; ++i)
        for (std::size_t j = i + 1; j < first + m; ++j)
          edges.push_back({{NodeIndex(i), NodeIndex(j)}, 1.0});
    };
    clique(0);
    clique(m + k);
    // Path m-1, m, ..., m+k (the last hop lands in the second clique).
    for (std::size_t v = m - 1; v < m + k; ++v) edges.push_back({{NodeIndex(v), NodeIndex(v + 1)}, 1.0});
  } else if (const auto* r = std::get_if<Ring>(&kind)) {
    n = r->n;
    for (std::size_t v = 0; v < n; ++v) edges.push_back({{NodeIndex(v), NodeIndex((v + 1) % n)}, 1.0});
  } else {
    const auto& er = std::get<ErdosRenyi>(kind);
    n = er.n;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (unit(rng) < er.p) edges.push_back({{NodeIndex(i), NodeIndex(j)}, 1.0});
  }
  return edges;
}

void validate(const GeneratorSpec& spec) {
  if (const auto* b = std::get_if<Barbell>(&spec.kind)) {
    if (b->clique_size < 2) throw DataError("barbell clique size must be at least 2");
  } else if (const auto* r = std::get_if<Ring>(&spec.kind)) {
    if (r->n < 3) throw DataError("ring needs at least 3 nodes");
  } else {
    const auto& er = std::get<ErdosRenyi>(spec.kind);
    if (er.n < 2) throw DataError("Erdos-Renyi graph needs at least 2 nodes");
    if (!(er.p > 0.0 && er.p <= 1.0)) throw DataError("Erdos-Renyi p must lie in (0, 1]");
  }
  if (const auto* w = std::get_if<UniformIntWeights>(&spec.weights)) {
    if (w->lo < 1 || w->hi < w->lo) throw DataError("integer weight bounds must satisfy 1 <= lo <= hi");
  }
}

}  // namespace

GraphKind parse_graph_kind(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.empty()) throw DataError("empty graph specification");
  std::optional<GraphKind> kind;
  if (parts[0] == "barbell" && parts.size() == 3) kind = Barbell{to_size(parts[1], text), to_size(parts[2], text)};
  if (parts[0] == "ring" && parts.size() == 2) kind = Ring{to_size(parts[1], text)};
  if (parts[0] == "er" && parts.size() == 3) kind = ErdosRenyi{to_size(parts[1], text), to_double(parts[2], text)};
  if (kind) {
    validate({*kind, UnitWeights{}, 0});
    return *kind;
  }
  throw DataError("unknown graph specification '" + text + "' (expected barbell:M:K, ring:N or er:N:P)");
}

WeightScheme parse_weight_scheme(const std::string& text) {
  if (text == "unit") return UnitWeights{};
  const auto parts = split(text, ':');
  if (parts.size() == 3 && parts[0] == "int") {
    const UniformIntWeights w{static_cast<int>(to_size(parts[1], text)), static_cast<int>(to_size(parts[2], text))};
    validate({Ring{}, w, 0});
    return w;
  }
  throw DataError("unknown weight scheme '" + text + "' (expected unit or int:LO:HI)");
}

std::string to_string(const GraphKind& kind) {
  std::ostringstream os;
  if (const auto* b = std::get_if<Barbell>(&kind))
    os << "barbell:" << b->clique_size << ':' << b->bridge_length;
  else if (const auto* r = std::get_if<Ring>(&kind))
    os << "ring:" << r->n;
  else
    os << "er:" << std::get<ErdosRenyi>(kind).n << ':' << std::get<ErdosRenyi>(kind).p;
  return os.str();
}

std::string to_string(const WeightScheme& weights) {
  if (const auto* w = std::get_if<UniformIntWeights>(&weights))
    return "int:" + std::to_string(w->lo) + ":" + std::to_string(w->hi);
  return "unit";
}

GeneratedGraph generate(const GeneratorSpec& spec) {
  validate(spec);
  std::seed_seq seq{spec.seed, std::uint64_t{0x6e6574}};
  std::mt19937_64 rng(seq);
  const bool needs_retry = std::holds_alternative<ErdosRenyi>(spec.kind);
  for (int attempt = 1; attempt <= kMaxConnectAttempts; ++attempt) {
    std::size_t n = 0;
    auto edges = topology(spec.kind, rng, n);
    if (const auto* w = std::get_if<UniformIntWeights>(&spec.weights)) {
      std::uniform_int_distribution<int> draw(w->lo, w->hi);
      for (auto& e : edges) e.weight = draw(rng);
    }
    Snapshot s(n, false, 0, std::move(edges));
    if (!needs_retry || is_connected(s)) return {std::move(s), attempt};
  }
  throw DataError("no connected Erdos-Renyi graph after " + std::to_string(kMaxConnectAttempts) + " attempts for " +
                  to_string(spec.kind));
}

bool is_barbell_clique_edge(const Barbell& b, EdgeKey key) {
  const std::size_t m = b.clique_size;
  const std::size_t second = m + b.bridge_length;
  auto in_first = [&](NodeIndex v) { return v < m; };
  auto in_second = [&](NodeIndex v) { return v >= second && v < second + m; };
  return (in_first(key.i) && in_first(key.j)) || (in_second(key.i) && in_second(key.j));
}

std::vector<double> symmetric_grid(double max_abs, std::size_t points) {
  if (points < 2) throw DataError("grid needs at least 2 points");
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k)
    grid[k] = -max_abs + 2.0 * max_abs * static_cast<double>(k) / static_cast<double>(points - 1);
  // Exact symmetry and an exact zero for odd point counts.
  for (std::size_t k = 0; k < points / 2; ++k) grid[points - 1 - k] = -grid[k];
  if (points % 2 == 1) grid[points / 2] = 0.0;
  return grid;
}

double PerturbationPoint::relative_error() const {
  if (actual == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::abs(predicted - actual) / std::abs(actual);
}

PerturbationExperiment run_perturbation(const Snapshot& base, const PerturbationOptions& opts) {
  if (base.directed()) throw DataError("perturbation experiments need an undirected graph");
  if (!is_connected(base)) throw DataError("perturbation base graph must be connected");
  {
    auto sorted = opts.grid;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k)
      if (std::abs(sorted[k] + sorted[sorted.size() - 1 - k]) > 1e-12)
        throw DataError("perturbation grid must be symmetric about 0");
  }

  const auto ep = leading_eigenpair(base, opts.solver);
  const auto imp = edge_importance(ep, base);

  std::vector<EdgeKey> selected = opts.edges;
  if (selected.empty())
    for (const auto& e : base.edges())
      if (!e.key.is_loop()) selected.push_back(e.key);
  for (auto& k : selected) k = base.canonical(k.i, k.j);

  std::vector<EdgeKey> all_edges;
  for (const auto& e : base.edges())
    if (!e.key.is_loop()) all_edges.push_back(e.key);
  std::vector<double> nonzero_grid;
  for (double g : opts.grid)
    if (g != 0.0) nonzero_grid.push_back(g);
  const bool dual = opts.mode == PerturbationMode::dual;
  if (dual && (all_edges.size() < 2 || nonzero_grid.empty()))
    throw DataError("dual-edge mode needs at least two edges and a nonzero grid value");

  auto delta_for = [&](double w, double g) { return opts.relative ? g * w : g; };

  // Validate every cell up front so the parallel loop cannot throw.
  for (const auto& key : selected) {
    const auto w = base.weight(key);
    if (!w) throw DataError("perturbed edge not present in base graph");
    for (double g : opts.grid)
      if (*w + delta_for(*w, g) <= 0.0) throw DataError("perturbation would make an edge weight non-positive");
  }
  if (dual)
    for (const auto& key : all_edges) {
      const double w = *base.weight(key);
      for (double g : nonzero_grid)
        if (w + delta_for(w, g) <= 0.0) throw DataError("partner perturbation would make a weight non-positive");
    }

  PerturbationExperiment out{base, ep.lambda, opts, {}};
  const std::size_t grid_n = opts.grid.size();
  out.results.resize(selected.size() * grid_n);
  const auto edges = base.edges();
  const double base_lambda = ep.lambda;

  auto run_cell = [&](std::size_t cell) {
    const std::size_t ei = cell / grid_n;
    const std::size_t gi = cell % grid_n;
    const EdgeKey key = selected[ei];
    const std::size_t pos = *base.find(key);
    PerturbationPoint p;
    p.edge = key;
    p.delta_a = opts.grid[gi];
    p.delta_weight = delta_for(edges[pos].weight, p.delta_a);
    p.l_e = imp.find(key)->value;
    p.predicted = p.l_e * p.delta_weight;

    std::vector<double> weights(edges.size());
    for (std::size_t k = 0; k < edges.size(); ++k) weights[k] = edges[k].weight;
    weights[pos] += p.delta_weight;

    if (dual) {
      std::seed_seq seq{opts.seed, std::uint64_t(ei), std::uint64_t(gi)};
      std::mt19937_64 rng(seq);
      std::uniform_int_distribution<std::size_t> pick_edge(0, all_edges.size() - 2);
      std::size_t idx = pick_edge(rng);
      const auto self = std::find(all_edges.begin(), all_edges.end(), key) - all_edges.begin();
      if (idx >= static_cast<std::size_t>(self)) ++idx;
      std::uniform_int_distribution<std::size_t> pick_delta(0, nonzero_grid.size() - 1);
      p.partner = all_edges[idx];
      p.partner_delta_a = nonzero_grid[pick_delta(rng)];
      p.partner_l_e = imp.find(p.partner)->value;
      p.observed_larger = p.l_e > p.partner_l_e;
      const std::size_t ppos = *base.find(p.partner);
      weights[ppos] += delta_for(edges[ppos].weight, p.partner_delta_a);
    }

    const bool unchanged = p.delta_weight == 0.0 && (!dual || p.partner_delta_a == 0.0);
    p.actual = unchanged ? 0.0 : leading_eigenpair(base.with_weights(weights), opts.solver).lambda - base_lambda;
    out.results[cell] = p;
  };

  const std::size_t cells = out.results.size();
  if (opts.exec == Exec::parallel) {
    // One eigen-solve per cell; the inner solver stays serial inside the team.
#pragma omp parallel for schedule(dynamic)
    for (std::size_t c = 0; c < cells; ++c) run_cell(c);
  } else {
    for (std::size_t c = 0; c < cells; ++c) run_cell(c);
  }
  return out;
}

}  // namespace edgeimp
