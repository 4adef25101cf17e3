#include "cli.hpp"

#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "edgeimp/analysis.hpp"
#include "edgeimp/error.hpp"
#include "edgeimp/estimation.hpp"
#include "edgeimp/evolution.hpp"
#include "edgeimp/generators.hpp"
#include "edgeimp/importance.hpp"
#include "edgeimp/ingest.hpp"
#include "edgeimp/prediction.hpp"
#include "json.hpp"

namespace edgeimp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------- output ---

std::string num(double v) { return fmt::format("{}", v); }

/// Provenance line: every option of the subcommand except the output location.
std::string config_line(const CLI::App& sub) {
  json cfg;
  cfg["command"] = sub.get_name();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "output-dir") continue;
    std::string value;
    if (opt->get_expected_max() == 0) {
      value = opt->count() > 0 ? "true" : "false";
    } else if (opt->count() > 0) {
      const auto res = opt->reduced_results();
      for (std::size_t k = 0; k < res.size(); ++k) value += (k ? "," : "") + res[k];
    } else {
      value = opt->get_default_str();
    }
    cfg[name] = value;
  }
  return "# config: " + cfg.dump();
}

class OutputDir {
 public:
  OutputDir(const std::string& dir, std::string config) : dir_(dir), config_(std::move(config)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw DataError("cannot create output directory '" + dir + "': " + ec.message());
  }

  /// Opens a file and writes the provenance line first.
  std::ofstream open(const std::string& name) const {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw DataError("cannot write '" + (dir_ / name).string() + "'");
    out << config_ << '\n';
    return out;
  }

  fs::path path(const std::string& name) const { return dir_ / name; }
  const std::string& config() const { return config_; }

 private:
  fs::path dir_;
  std::string config_;
};

// ------------------------------------------------------------ shared args ---

struct GraphArgs {
  std::string input;
  std::string graph;
  std::string weights = "unit";
};

void add_graph_args(CLI::App* sub, GraphArgs& g) {
  sub->add_option("--input", g.input, "Network file written by `ingest` (or `simulate`)");
  sub->add_option("--graph", g.graph, "Synthetic graph: barbell:M:K, ring:N or er:N:P");
  sub->add_option("--weights", g.weights, "Synthetic weights: unit or int:LO:HI");
}

TemporalNetwork load_or_generate(const GraphArgs& g, std::uint64_t seed) {
  if (!g.input.empty() && !g.graph.empty()) throw ConfigError("give either --input or --graph, not both");
  if (!g.input.empty()) return load_network(g.input);
  if (g.graph.empty()) throw ConfigError("one of --input or --graph is required");
  GeneratorSpec spec{parse_graph_kind(g.graph), parse_weight_scheme(g.weights), seed};
  return single_snapshot_network(generate(spec).graph);
}

/// Snapshot with zero-weight entries dropped.
Snapshot positive_part(const Snapshot& s) {
  std::vector<Edge> edges;
  for (const auto& e : s.edges())
    if (e.weight > 0.0) edges.push_back(e);
  return Snapshot(s.num_nodes(), s.directed(), s.timestamp(), std::move(edges)).with_origin(
      std::vector<NodeIndex>(s.origin().begin(), s.origin().end()));
}

void require_undirected(const TemporalNetwork& net, const char* command) {
  if (net.directed())
    throw DataError(std::string(command) + " needs an undirected network (ingest with --undirected)");
}

std::string edge_label(const TemporalNetwork& net, EdgeKey k) {
  return net.label(k.i) + "," + net.label(k.j);
}

std::int64_t parse_window(const std::string& text, TimeFormat f) {
  if (text.empty()) throw ConfigError("empty --window");
  std::int64_t unit = 1;
  std::string digits = text;
  const char suffix = text.back();
  if (std::isalpha(static_cast<unsigned char>(suffix))) {
    digits.pop_back();
    static const std::map<char, std::int64_t> unix_units{{'s', 1}, {'m', 60}, {'h', 3600}, {'d', 86400}, {'w', 604800}};
    static const std::map<char, std::int64_t> date_units{{'d', 1}, {'w', 7}};
    const auto& table = f == TimeFormat::unix_seconds ? unix_units : date_units;
    auto it = table.find(suffix);
    if ((f != TimeFormat::unix_seconds && f != TimeFormat::date) || it == table.end())
      throw ConfigError("window suffix '" + std::string(1, suffix) + "' not valid for time format " + to_string(f));
    unit = it->second;
  }
  std::int64_t n = 0;
  try {
    std::size_t pos = 0;
    n = std::stoll(digits, &pos);
    if (pos != digits.size()) throw std::invalid_argument(digits);
  } catch (const std::exception&) {
    throw ConfigError("invalid --window '" + text + "'");
  }
  if (n <= 0) throw ConfigError("--window must be positive");
  return n * unit;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("invalid number '" + item + "' in list '" + text + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

/// "MAX:POINTS" gives a symmetric grid; otherwise a comma-separated list.
std::vector<double> parse_grid(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return parse_list(text);
  const auto max_abs = parse_list(text.substr(0, colon));
  const auto points = parse_list(text.substr(colon + 1));
  if (max_abs.size() != 1 || points.size() != 1 || points[0] < 2 || points[0] != std::floor(points[0]))
    throw ConfigError("invalid --grid '" + text + "' (expected MAX:POINTS)");
  return symmetric_grid(max_abs[0], static_cast<std::size_t>(points[0]));
}

// ---------------------------------------------------------------- ingest ---

struct IngestArgs {
  std::string input, output_dir;
  std::string delimiter = ",";
  bool whitespace = false, header = false, undirected = false, drop_empty = false, self_loops = false;
  std::string source = "0", target = "1", time = "2", weight;
  double default_weight = 1.0;
  std::string time_format = "int", window = "1", mode = "sum", missing;
};

void cmd_ingest(const CLI::App& sub, const IngestArgs& a) {
  ParseOptions po;
  if (a.delimiter.size() != 1) throw ConfigError("--delimiter must be a single character");
  po.delimiter = a.delimiter[0];
  po.whitespace = a.whitespace;
  po.header = a.header;
  po.source_column = a.source;
  po.target_column = a.target;
  po.time_column = a.time;
  if (!a.weight.empty()) po.weight_column = a.weight;
  po.default_weight = a.default_weight;
  po.time_format = parse_time_format(a.time_format);
  if (!a.missing.empty()) po.missing_value = a.missing;
  po.allow_self_loops = a.self_loops;

  AggregateOptions ao;
  ao.time_format = po.time_format;
  ao.window = parse_window(a.window, po.time_format);
  ao.mode = parse_weight_mode(a.mode);
  ao.undirected = a.undirected;
  ao.drop_empty = a.drop_empty;

  const auto parsed = parse_edge_list(a.input, po);
  const TemporalNetwork agg = aggregate(parsed.records, ao);
  NetworkMetadata meta = agg.metadata();
  meta.extra["config"] = config_line(sub).substr(10);
  meta.extra["skipped_missing"] = std::to_string(parsed.skipped_missing);
  meta.extra["skipped_self_loops"] = std::to_string(parsed.skipped_self_loops);
  const TemporalNetwork net(std::vector<std::string>(agg.labels().begin(), agg.labels().end()), agg.directed(),
                            std::vector<Snapshot>(agg.snapshots().begin(), agg.snapshots().end()), meta);

  OutputDir out(a.output_dir, config_line(sub));
  save_network(net, out.path("network.json"));
  auto summary = out.open("ingest_summary.csv");
  summary << "timestamp,num_edges,total_weight\n";
  std::size_t edges = 0;
  for (const auto& s : net.snapshots()) {
    summary << s.timestamp() << ',' << s.num_edges() << ',' << num(s.total_weight()) << '\n';
    edges += s.num_edges();
  }
  std::cout << fmt::format("records {} (skipped: {} missing, {} self-loops), nodes {}, snapshots {}, edges {}\n",
                           parsed.records.size(), parsed.skipped_missing, parsed.skipped_self_loops, net.num_nodes(),
                           net.size(), edges);
}

// ------------------------------------------------------------ importance ---

struct ImportanceArgs {
  GraphArgs graph;
  std::string output_dir;
  std::uint64_t seed = 0;
  bool all_pairs = false;
  std::size_t kde_points = 200;
};

void cmd_importance(const CLI::App& sub, const ImportanceArgs& a) {
  const TemporalNetwork net = load_or_generate(a.graph, a.seed);
  OutputDir out(a.output_dir, config_line(sub));
  auto table = out.open("importance.csv");
  std::vector<double> logs;
  std::size_t floored = 0, snapshots_used = 0;
  if (net.directed()) {
    table << "timestamp,node_i,node_j,ds_dM,ln_ds_dM\n";
    for (const auto& raw : net.snapshots()) {
      const Snapshot s = positive_part(raw);
      if (s.num_edges() == 0) continue;
      ++snapshots_used;
      const auto st = leading_singular(s);
      for (const auto& d : edge_importance_directed(st, s)) {
        const double lv = std::log(std::max(d.value, kImportanceFloor));
        table << s.timestamp() << ',' << edge_label(net, d.key) << ',' << num(d.value) << ',' << num(lv) << '\n';
        logs.push_back(lv);
      }
    }
  } else {
    table << "timestamp,source,target,l_e,ln_l_e\n";
    for (const auto& raw : net.snapshots()) {
      const Snapshot s = positive_part(raw);
      if (s.num_edges() == 0) continue;
      ++snapshots_used;
      const Snapshot gc = giant_component(s);
      const auto ep = leading_eigenpair(gc);
      ImportanceOptions io;
      io.all_pairs = a.all_pairs;
      const auto imp = edge_importance(ep, gc, io);
      floored += imp.floored_count();
      for (const auto& e : imp.entries) {
        const EdgeKey orig{gc.origin(e.key.i), gc.origin(e.key.j)};
        table << s.timestamp() << ',' << edge_label(net, orig) << ',' << num(e.value) << ',' << num(e.log_value())
              << '\n';
        logs.push_back(e.log_value());
      }
    }
  }
  auto summary = out.open("importance_summary.txt");
  summary << "snapshots_used: " << snapshots_used << "\nvalues: " << logs.size() << "\nfloored: " << floored << '\n';
  if (logs.size() >= 2) {
    const auto kde = kde_fit(logs);
    const auto grid = kde_grid(kde, a.kde_points);
    const auto dens = kde_eval(kde, grid);
    auto density = out.open("lnl_density.csv");
    density << "ln_l_e,density\n";
    for (std::size_t g = 0; g < grid.size(); ++g) density << num(grid[g]) << ',' << num(dens[g]) << '\n';
    summary << "kde_bandwidth: " << num(kde.bandwidth) << '\n';
    try {
      const auto ks = ks_normal(logs);
      summary << "ks_normal_statistic: " << num(ks.statistic) << "\nln_mean: " << num(ks.mean)
              << "\nln_sd: " << num(ks.sd) << '\n';
    } catch (const DataError& e) {
      summary << "ks_normal_statistic: nan (" << e.what() << ")\n";
    }
  }
  std::cout << fmt::format("{} importance values over {} snapshots\n", logs.size(), snapshots_used);
}

// --------------------------------------------------------------- perturb ---

struct PerturbArgs {
  std::string graph, weights = "unit", output_dir, mode = "single", grid = "0.05:21";
  std::uint64_t seed = 0;
  bool absolute = false;
};

void cmd_perturb(const CLI::App& sub, const PerturbArgs& a) {
  GeneratorSpec spec{parse_graph_kind(a.graph), parse_weight_scheme(a.weights), a.seed};
  const auto gen = generate(spec);
  PerturbationOptions po;
  if (a.mode == "single") po.mode = PerturbationMode::single;
  else if (a.mode == "dual") po.mode = PerturbationMode::dual;
  else throw ConfigError("--mode must be single or dual");
  po.grid = parse_grid(a.grid);
  po.relative = !a.absolute;
  po.seed = a.seed;
  const auto exp = run_perturbation(gen.graph, po);

  OutputDir out(a.output_dir, config_line(sub));
  auto table = out.open("perturbation.csv");
  const bool dual = po.mode == PerturbationMode::dual;
  table << "edge,delta_a,delta_lambda_actual,delta_lambda_predicted,l_e";
  if (dual) table << ",partner,partner_delta_a,partner_l_e,observed_larger";
  table << '\n';
  std::map<double, std::vector<double>> errors;
  for (const auto& p : exp.results) {
    table << p.edge.i << '-' << p.edge.j << ',' << num(p.delta_a) << ',' << num(p.actual) << ',' << num(p.predicted)
          << ',' << num(p.l_e);
    if (dual)
      table << ',' << p.partner.i << '-' << p.partner.j << ',' << num(p.partner_delta_a) << ',' << num(p.partner_l_e)
            << ',' << (p.observed_larger ? 1 : 0);
    table << '\n';
    if (p.actual != 0.0) errors[std::stod(fmt::format("{:.9g}", std::abs(p.delta_a)))].push_back(p.relative_error());
  }
  auto summary = out.open("perturbation_summary.csv");
  summary << "abs_delta_a,points,median_rel_error,fraction_within_10pct\n";
  for (auto& [d, errs] : errors) {
    std::size_t ok = 0;
    for (double e : errs) ok += e <= 0.1 ? 1 : 0;
    summary << num(d) << ',' << errs.size() << ',' << num(quantile(errs, 0.5)) << ','
            << num(static_cast<double>(ok) / static_cast<double>(errs.size())) << '\n';
  }
  std::cout << fmt::format("{} cells on {} (lambda {}, {} generation attempts)\n", exp.results.size(),
                           to_string(spec.kind), num(exp.base_lambda), gen.attempts);
}

// -------------------------------------------------------------- simulate ---

struct SimulateArgs {
  GraphArgs graph;
  std::string output_dir;
  std::uint64_t seed = 0, chain = 0;
  double alpha = 0.5, rho = 0.5, beta = 0.01, gamma = 0.0;
  std::size_t steps = 100, seeds = 10;
  std::string sweep_alpha, sweep_rho;
  double test_fraction = 0.2;
  int dummy_trials = 100;
};

void cmd_simulate(const CLI::App& sub, const SimulateArgs& a) {
  OutputDir out(a.output_dir, config_line(sub));
  if (!a.sweep_alpha.empty() || !a.sweep_rho.empty()) {
    if (a.graph.graph.empty()) throw ConfigError("a sweep needs --graph (each seed draws its own base graph)");
    SweepOptions so;
    so.base = {parse_graph_kind(a.graph.graph), parse_weight_scheme(a.graph.weights), a.seed};
    so.alphas = a.sweep_alpha.empty() ? std::vector<double>{a.alpha} : parse_list(a.sweep_alpha);
    so.rhos = a.sweep_rho.empty() ? std::vector<double>{a.rho} : parse_list(a.sweep_rho);
    so.beta = a.beta;
    so.gamma = a.gamma;
    so.steps = a.steps;
    for (std::uint64_t k = 0; k < a.seeds; ++k) so.seeds.push_back(a.seed + k);
    so.test_fraction = a.test_fraction;
    so.dummy_trials = a.dummy_trials;
    const auto cells = predictability_sweep(so);
    auto table = out.open("sweep.csv");
    table << "alpha,rho,runs,mean_improvement,ci_low,ci_high,mean_pr_auc,mean_dummy_pr_auc,skipped\n";
    for (const auto& c : cells)
      table << num(c.alpha) << ',' << num(c.rho) << ',' << c.improvements.size() << ',' << num(c.mean_improvement)
            << ',' << num(c.ci_low) << ',' << num(c.ci_high) << ',' << num(c.mean_pr_auc) << ','
            << num(c.mean_dummy_pr_auc) << ',' << '"' << c.skipped << '"' << '\n';
    std::cout << fmt::format("{} sweep cells x {} seeds\n", cells.size(), so.seeds.size());
    return;
  }

  const TemporalNetwork source = load_or_generate(a.graph, a.seed);
  require_undirected(source, "simulate");
  const Snapshot gc = giant_component(positive_part(source.snapshot(0)));
  if (gc.num_edges() == 0) throw DataError("the first snapshot has no edges to evolve");
  const EvolutionParams p{a.alpha, a.rho, a.beta, a.gamma, {}, {}, {}, {}};
  const auto sim = simulate(gc.with_timestamp(0), p, a.steps, a.seed, a.chain);

  std::vector<std::string> labels;
  for (NodeIndex v = 0; v < gc.num_nodes(); ++v) labels.push_back(source.label(gc.origin(v)));
  NetworkMetadata meta;
  meta.extra["config"] = out.config().substr(10);
  const TemporalNetwork net(labels, false,
                            std::vector<Snapshot>(sim.network.snapshots().begin(), sim.network.snapshots().end()),
                            meta);
  save_network(net, out.path("network.json"));
  auto table = out.open("changes.csv");
  table << "t,source,target,l_e,changed,rel_change\n";
  std::size_t changed = 0;
  for (const auto& r : sim.records) {
    table << r.t << ',' << edge_label(net, r.key) << ',' << num(r.l_e) << ',' << (r.changed ? 1 : 0) << ','
          << num(r.rel_change) << '\n';
    changed += r.changed ? 1 : 0;
  }
  auto summary = out.open("simulate_summary.txt");
  summary << "nodes: " << gc.num_nodes() << "\nedges: " << gc.num_edges() << "\nsteps: " << a.steps
          << "\nrecords: " << sim.records.size() << "\nchanged: " << changed
          << "\nsaturation_fraction: " << num(sim.saturation_fraction) << "\nredraws: " << sim.redraws
          << "\nfloored: " << sim.floored << '\n';
  std::cout << fmt::format("{} records, {} changed, saturation {}\n", sim.records.size(), changed,
                           num(sim.saturation_fraction));
}

// -------------------------------------------------------------- estimate ---

struct EstimateArgs {
  std::string input, output_dir;
  std::uint64_t seed = 0;
  double tol = 1e-12;
  std::size_t grid_points = 101;
};

void write_optional(std::ostream& os, const char* key, const std::optional<double>& v) {
  os << key << ": " << (v ? num(*v) : std::string("nan")) << '\n';
}

void cmd_estimate(const CLI::App& sub, const EstimateArgs& a) {
  const TemporalNetwork net = load_network(a.input);
  require_undirected(net, "estimate");
  const auto obs = observe_changes(net, a.tol);
  const auto samples = build_samples(obs.records, a.tol);
  OutputDir out(a.output_dir, config_line(sub));
  auto rep = out.open("fit_report.txt");
  rep << "transitions: " << obs.transitions << "\nskipped_transitions: " << obs.skipped_transitions
      << "\nrecords: " << obs.records.size() << "\nexcluded_new_edges: " << samples.excluded_new
      << "\nexcluded_vanished_edges: " << samples.excluded_vanished << "\noutside_giant_component: "
      << obs.outside_giant << "\nbernoulli_records: " << samples.bernoulli.size()
      << "\nmagnitude_records: " << samples.magnitude.size()
      << "\nstandard_errors: sqrt(diag((-H)^-1)) from a central-difference Hessian\n";

  const auto fit = fit_alpha_rho(samples.bernoulli);
  rep << "alpha: " << num(fit.alpha) << '\n';
  write_optional(rep, "se_alpha", fit.se_alpha);
  rep << "rho: " << num(fit.rho) << '\n';
  write_optional(rep, "se_rho", fit.se_rho);
  rep << "alpha_rho_log_likelihood: " << num(fit.log_likelihood) << "\nalpha_rho_iterations: " << fit.iterations
      << "\nalpha_rho_gradient_norm: " << num(fit.gradient_norm) << "\nalpha_rho_converged: " << fit.converged
      << "\nupper_constraint_active: " << fit.upper_active << "\nlower_constraint_active: " << fit.lower_active
      << "\nrank_deficient: " << fit.rank_deficient << "\nse_reliable: " << fit.se_reliable << '\n';

  std::optional<MagnitudeFit> mfit;
  try {
    mfit = fit_beta_gamma(samples.magnitude);
  } catch (const DataError& e) {
    rep << "beta_gamma: unavailable (" << e.what() << ")\n";
  }
  if (mfit) {
    rep << "beta: " << num(mfit->beta) << '\n';
    write_optional(rep, "se_beta", mfit->se_beta);
    rep << "gamma: " << num(mfit->gamma) << '\n';
    write_optional(rep, "se_gamma", mfit->se_gamma);
    rep << "beta_gamma_log_likelihood: " << num(mfit->log_likelihood)
        << "\nbeta_gamma_gradient_norm: " << num(mfit->gradient_norm) << "\nbeta_gamma_converged: " << mfit->converged
        << "\nbeta_boundary: " << mfit->boundary << '\n';
  }

  // Model-versus-data overlays.
  const auto& b = samples.bernoulli;
  const auto curve = conditional_no_change(b.log_l, b.changed, {}, std::nullopt);
  auto overlay = out.open("conditional_overlay.csv");
  overlay << "ln_l_e,p_no_change_data,p_no_change_model,support\n";
  const EvolutionParams fitted{fit.alpha, fit.rho, 0.0, 0.0, {}, {}, {}, {}};
  for (std::size_t g = 0; g < curve.grid.size(); ++g)
    overlay << num(curve.grid[g]) << ',' << num(curve.p_no_change[g]) << ','
            << num(1.0 - change_probability(std::exp(curve.grid[g]), fitted)) << ',' << num(curve.support[g]) << '\n';

  if (mfit && !mfit->boundary && samples.magnitude.size() >= 2) {
    std::mt19937_64 rng = chain_rng(a.seed, 0);
    std::vector<double> data, model;
    for (std::size_t i = 0; i < samples.magnitude.size(); ++i) {
      if (samples.magnitude.x[i] > -1.0) data.push_back(std::log1p(samples.magnitude.x[i]));
      std::normal_distribution<double> gauss(0.0, mfit->beta * std::exp(mfit->gamma * samples.magnitude.log_l[i]));
      const double u = gauss(rng);
      if (u > -1.0) model.push_back(std::log1p(u));
    }
    if (data.size() >= 2 && model.size() >= 2) {
      const auto kd = kde_fit(data), km = kde_fit(model);
      const double lo = std::min(*std::min_element(data.begin(), data.end()) - 3 * kd.bandwidth,
                                 *std::min_element(model.begin(), model.end()) - 3 * km.bandwidth);
      const double hi = std::max(*std::max_element(data.begin(), data.end()) + 3 * kd.bandwidth,
                                 *std::max_element(model.begin(), model.end()) + 3 * km.bandwidth);
      const auto grid = linear_grid(lo, hi, a.grid_points);
      const auto dd = kde_eval(kd, grid), dm = kde_eval(km, grid);
      auto mo = out.open("magnitude_overlay.csv");
      mo << "ln_1p_delta_a,density_data,density_model\n";
      for (std::size_t g = 0; g < grid.size(); ++g) mo << num(grid[g]) << ',' << num(dd[g]) << ',' << num(dm[g]) << '\n';
    }
  }
  std::cout << fmt::format("alpha {} rho {}", num(fit.alpha), num(fit.rho));
  if (mfit) std::cout << fmt::format(" beta {} gamma {}", num(mfit->beta), num(mfit->gamma));
  std::cout << '\n';
}

// --------------------------------------------------------------- predict ---

struct PredictArgs {
  std::string input, output_dir;
  std::uint64_t seed = 0;
  double tol = 1e-12, test_fraction = 0.2;
  int dummy_trials = 100;
  bool per_transition = false;
};

void write_eval(std::ostream& os, const LogisticModel& m, const EvalReport& r) {
  os << "logistic_w: " << num(m.w) << "\nlogistic_b: " << num(m.b) << "\nlogistic_converged: " << m.converged
     << "\nn_train: " << r.n_train << "\nn_test: " << r.n_test << "\ntrain_prior: " << num(r.train_prior)
     << "\ntest_prior: " << num(r.test_prior) << "\nbalanced_accuracy: " << num(r.balanced_accuracy)
     << "\nroc_auc: " << num(r.roc_auc) << "\npr_auc: " << num(r.pr_auc);
  auto metric = [&](const char* name, const MetricSummary& s) {
    os << "\ndummy_" << name << ": " << num(s.mean) << " [" << num(s.ci_low) << ", " << num(s.ci_high) << "]";
  };
  metric("balanced_accuracy", r.dummy_balanced_accuracy);
  metric("roc_auc", r.dummy_roc_auc);
  metric("pr_auc", r.dummy_pr_auc);
  os << "\npr_auc_improvement: " << num(r.pr_auc_improvement()) << '\n';
}

void cmd_predict(const CLI::App& sub, const PredictArgs& a) {
  const TemporalNetwork net = load_network(a.input);
  require_undirected(net, "predict");
  const auto obs = observe_changes(net, a.tol);
  const auto examples = examples_from_records(obs.records);
  OutputDir out(a.output_dir, config_line(sub));

  auto fit_eval = [&](std::span<const LabeledExample> ex, LogisticModel& model) {
    const Split split = stratified_split(ex, a.test_fraction, a.seed);
    model = fit_logistic(split.train);
    std::size_t pos = 0;
    for (const auto& e : split.train) pos += e.label;
    EvalOptions eo;
    eo.dummy_trials = a.dummy_trials;
    eo.seed = a.seed;
    eo.train_prior = static_cast<double>(pos) / static_cast<double>(split.train.size());
    eo.n_train = split.train.size();
    return evaluate(model, split.test, eo);
  };

  LogisticModel model;
  const EvalReport report = fit_eval(examples, model);
  auto rep = out.open("eval_report.txt");
  rep << "examples: " << examples.size() << '\n';
  write_eval(rep, model, report);
  auto roc = out.open("roc.csv");
  roc << "fpr,tpr\n";
  for (const auto& p : report.roc_curve) roc << num(p.x) << ',' << num(p.y) << '\n';
  auto pr = out.open("pr.csv");
  pr << "recall,precision\n";
  for (const auto& p : report.pr_curve) pr << num(p.x) << ',' << num(p.y) << '\n';

  if (a.per_transition) {
    std::map<std::size_t, std::vector<LabeledExample>> by_t;
    for (const auto& r : obs.records)
      if (r.persistent()) by_t[r.t].push_back({std::log(r.l_e), static_cast<std::uint8_t>(r.changed ? 1 : 0)});
    auto table = out.open("per_transition.csv");
    table << "t,examples,balanced_accuracy,roc_auc,pr_auc,dummy_pr_auc,pr_auc_improvement,skipped\n";
    for (const auto& [t, ex] : by_t) {
      try {
        LogisticModel m;
        const auto r = fit_eval(ex, m);
        table << t << ',' << ex.size() << ',' << num(r.balanced_accuracy) << ',' << num(r.roc_auc) << ','
              << num(r.pr_auc) << ',' << num(r.dummy_pr_auc.mean) << ',' << num(r.pr_auc_improvement()) << ",\n";
      } catch (const DataError& e) {
        table << t << ',' << ex.size() << ",nan,nan,nan,nan,nan,\"" << e.what() << "\"\n";
      }
    }
  }
  std::cout << fmt::format("balanced accuracy {} ROC-AUC {} PR-AUC {} (dummy {})\n", num(report.balanced_accuracy),
                           num(report.roc_auc), num(report.pr_auc), num(report.dummy_pr_auc.mean));
}

// ---------------------------------------------------------------- report ---

struct ReportArgs {
  std::string input, output_dir;
  std::uint64_t seed = 0;
  double tol = 1e-12;
  std::size_t bins = 10, grid_points = 101;
};

void cmd_report(const CLI::App& sub, const ReportArgs& a) {
  const TemporalNetwork net = load_network(a.input);
  require_undirected(net, "report");
  const auto obs = observe_changes(net, a.tol);
  OutputDir out(a.output_dir, config_line(sub));
  auto summary = out.open("report_summary.txt");
  summary << "transitions: " << obs.transitions << "\nrecords: " << obs.records.size()
          << "\nnew_edges: " << obs.new_edges << "\nvanished_edges: " << obs.vanished_edges
          << "\noutside_giant_component: " << obs.outside_giant << '\n';

  std::vector<double> all, changed, unchanged;
  std::vector<std::uint8_t> flags;
  for (const auto& r : obs.records) {
    if (!r.persistent()) continue;
    const double l = std::log(r.l_e);
    all.push_back(l);
    flags.push_back(r.changed ? 1 : 0);
    (r.changed ? changed : unchanged).push_back(l);
  }
  auto box = out.open("boxplot.csv");
  box << "class,n,min,q1,median,q3,max,mean\n";
  for (const auto& [name, xs] : {std::pair{"changed", &changed}, std::pair{"unchanged", &unchanged}}) {
    if (xs->empty()) {
      box << name << ",0,nan,nan,nan,nan,nan,nan\n";
      continue;
    }
    const auto s = summarize(*xs);
    box << name << ',' << s.n << ',' << num(s.min) << ',' << num(s.q1) << ',' << num(s.median) << ',' << num(s.q3)
        << ',' << num(s.max) << ',' << num(s.mean) << '\n';
  }
  try {
    const auto w = welch_t_test(changed, unchanged);
    summary << "welch_t: " << num(w.t) << "\nwelch_df: " << num(w.df) << "\nwelch_p_value: " << num(w.p_value) << '\n';
  } catch (const DataError& e) {
    summary << "welch_t: nan (" << e.what() << ")\n";
  }
  try {
    const auto ks = ks_normal(all);
    summary << "ks_normal_statistic: " << num(ks.statistic) << '\n';
  } catch (const DataError& e) {
    summary << "ks_normal_statistic: nan (" << e.what() << ")\n";
  }

  if (!all.empty()) {
    const auto curve = conditional_no_change(all, flags, {}, std::nullopt);
    auto cc = out.open("conditional_curve.csv");
    cc << "ln_l_e,p_no_change,support\n";
    for (std::size_t g = 0; g < curve.grid.size(); ++g)
      cc << num(curve.grid[g]) << ',' << num(curve.p_no_change[g]) << ',' << num(curve.support[g]) << '\n';
    summary << "conditional_bandwidth: " << num(curve.bandwidth) << "\nconditional_degenerate: " << curve.degenerate
            << '\n';
    const auto binned = conditional_no_change_binned(all, flags, a.bins);
    auto cb = out.open("conditional_binned.csv");
    cb << "lower,upper,count,p_no_change\n";
    for (std::size_t b = 0; b < binned.count.size(); ++b)
      cb << num(binned.lower[b]) << ',' << num(binned.upper[b]) << ',' << binned.count[b] << ','
         << num(binned.p_no_change[b]) << '\n';
  }

  try {
    JointOptions jo;
    jo.bins = a.bins;
    const auto joint = joint_change_distribution(obs.records, jo);
    auto jd = out.open("joint_density.csv");
    jd << "ln_1p_delta_a\\ln_l_e";
    for (double x : joint.log_l_grid) jd << ',' << num(x);
    jd << '\n';
    for (std::size_t r = 0; r < joint.y_grid.size(); ++r) {
      jd << num(joint.y_grid[r]);
      for (std::size_t c = 0; c < joint.log_l_grid.size(); ++c)
        jd << ',' << num(joint.density[r * joint.log_l_grid.size() + c]);
      jd << '\n';
    }
    auto jb = out.open("joint_bins.csv");
    jb << "lower,upper,center,count,std_ln_1p_delta_a\n";
    for (const auto& b : joint.bins)
      jb << num(b.lower) << ',' << num(b.upper) << ',' << num(b.center) << ',' << b.count << ',' << num(b.std_dev)
         << '\n';
    summary << "joint_used: " << joint.used << "\njoint_excluded_new: " << joint.excluded_new
            << "\njoint_excluded_vanishing: " << joint.excluded_vanishing << "\nbin_std_slope: " << num(joint.slope)
            << "\nbin_std_slope_ci: [" << num(joint.slope_ci_low) << ", " << num(joint.slope_ci_high)
            << "]\nbin_std_spearman: " << num(joint.bin_spearman) << '\n';
  } catch (const DataError& e) {
    summary << "joint_distribution: unavailable (" << e.what() << ")\n";
  }

  auto corr = out.open("correlations.csv");
  corr << "column,spearman_with_l_e,n\n";
  for (const auto& row : importance_correlates(net, a.tol))
    corr << row.name << ',' << num(row.spearman) << ',' << row.n << '\n';
  std::cout << fmt::format("{} records over {} transitions\n", obs.records.size(), obs.transitions);
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Spectral edge importance and edge-evolution toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  std::function<void()> action;

  IngestArgs ia;
  auto* ingest = app.add_subcommand("ingest", "Timestamped edge list -> network file");
  ingest->add_option("--input", ia.input, "Delimited edge list")->required();
  ingest->add_option("--output-dir", ia.output_dir, "Directory for network.json and summaries")->required();
  ingest->add_option("--delimiter", ia.delimiter, "Field delimiter");
  ingest->add_flag("--whitespace", ia.whitespace, "Split fields on blanks");
  ingest->add_flag("--header", ia.header, "First non-comment row is a header");
  ingest->add_option("--source-col", ia.source, "Source column (index or header name)");
  ingest->add_option("--target-col", ia.target, "Target column (index or header name)");
  ingest->add_option("--time-col", ia.time, "Timestamp column (index or header name)");
  ingest->add_option("--weight-col", ia.weight, "Weight column; absent means --default-weight");
  ingest->add_option("--default-weight", ia.default_weight, "Weight when no weight column is given");
  ingest->add_option("--time-format", ia.time_format, "int, year, date (YYYY-MM-DD) or unix");
  ingest->add_option("--window", ia.window, "Window width in time units; unix/date accept s,m,h,d,w suffixes");
  ingest->add_option("--weight-mode", ia.mode, "sum, count or last");
  ingest->add_option("--missing-value", ia.missing, "Weight token marking a missing row (skipped)");
  ingest->add_flag("--undirected", ia.undirected, "Merge (i,j) and (j,i)");
  ingest->add_flag("--drop-empty", ia.drop_empty, "Omit windows without records");
  ingest->add_flag("--allow-self-loops", ia.self_loops, "Keep rows with source == target");
  ingest->callback([&] { action = [&] { cmd_ingest(*ingest, ia); }; });

  ImportanceArgs ima;
  auto* importance = app.add_subcommand("importance", "Per-snapshot l_e tables and ln(l_e) density");
  add_graph_args(importance, ima.graph);
  importance->add_option("--output-dir", ima.output_dir, "Output directory")->required();
  importance->add_option("--seed", ima.seed, "Seed for --graph");
  importance->add_flag("--all-pairs", ima.all_pairs, "Evaluate every node pair, not only present edges");
  importance->add_option("--kde-points", ima.kde_points, "Grid points of the density");
  importance->callback([&] { action = [&] { cmd_importance(*importance, ima); }; });

  PerturbArgs pa;
  auto* perturb = app.add_subcommand("perturb", "Perturbation lab: exact vs first-order eigenvalue change");
  perturb->add_option("--graph", pa.graph, "barbell:M:K, ring:N or er:N:P")->required();
  perturb->add_option("--weights", pa.weights, "unit or int:LO:HI");
  perturb->add_option("--output-dir", pa.output_dir, "Output directory")->required();
  perturb->add_option("--seed", pa.seed, "Seed for the graph and partner choice");
  perturb->add_option("--mode", pa.mode, "single or dual");
  perturb->add_option("--grid", pa.grid, "MAX:POINTS symmetric grid or a comma list of ΔA");
  perturb->add_flag("--absolute", pa.absolute, "Grid values are absolute weight changes");
  perturb->callback([&] { action = [&] { cmd_perturb(*perturb, pa); }; });

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Run the edge-evolution model or a predictability sweep");
  add_graph_args(sim, sa.graph);
  sim->add_option("--output-dir", sa.output_dir, "Output directory")->required();
  sim->add_option("--seed", sa.seed, "Seed (sweeps use seed .. seed+seeds-1)");
  sim->add_option("--chain", sa.chain, "Chain index for the random stream");
  sim->add_option("--alpha", sa.alpha, "Change-probability scale");
  sim->add_option("--rho", sa.rho, "Change-probability exponent");
  sim->add_option("--beta", sa.beta, "Change-magnitude scale");
  sim->add_option("--gamma", sa.gamma, "Change-magnitude exponent");
  sim->add_option("--steps", sa.steps, "Number of transitions T");
  sim->add_option("--sweep-alpha", sa.sweep_alpha, "Comma list of alpha values for a sweep");
  sim->add_option("--sweep-rho", sa.sweep_rho, "Comma list of rho values for a sweep");
  sim->add_option("--seeds", sa.seeds, "Seeds per sweep cell");
  sim->add_option("--test-fraction", sa.test_fraction, "Test share in sweeps");
  sim->add_option("--dummy-trials", sa.dummy_trials, "Dummy repetitions in sweeps");
  sim->callback([&] { action = [&] { cmd_simulate(*sim, sa); }; });

  EstimateArgs ea;
  auto* est = app.add_subcommand("estimate", "Fit (alpha, rho) and (beta, gamma) on a network file");
  est->add_option("--input", ea.input, "Network file")->required();
  est->add_option("--output-dir", ea.output_dir, "Output directory")->required();
  est->add_option("--seed", ea.seed, "Seed for the model overlay draws");
  est->add_option("--tol", ea.tol, "|ΔA| above this counts as a change");
  est->add_option("--grid-points", ea.grid_points, "Overlay grid points");
  est->callback([&] { action = [&] { cmd_estimate(*est, ea); }; });

  PredictArgs pra;
  auto* pred = app.add_subcommand("predict", "Logistic change classification against a stratified dummy");
  pred->add_option("--input", pra.input, "Network file")->required();
  pred->add_option("--output-dir", pra.output_dir, "Output directory")->required();
  pred->add_option("--seed", pra.seed, "Seed for the split and the dummy");
  pred->add_option("--tol", pra.tol, "|ΔA| above this counts as a change");
  pred->add_option("--test-fraction", pra.test_fraction, "Stratified test share");
  pred->add_option("--dummy-trials", pra.dummy_trials, "Dummy repetitions");
  pred->add_flag("--per-transition", pra.per_transition, "Also evaluate each transition separately");
  pred->callback([&] { action = [&] { cmd_predict(*pred, pra); }; });

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Conditional curves, joint distributions and correlation table");
  report->add_option("--input", ra.input, "Network file")->required();
  report->add_option("--output-dir", ra.output_dir, "Output directory")->required();
  report->add_option("--seed", ra.seed, "Accepted for uniformity; the report draws no random numbers");
  report->add_option("--tol", ra.tol, "|ΔA| above this counts as a change");
  report->add_option("--bins", ra.bins, "Bins for binned curves and spread statistics");
  report->add_option("--grid-points", ra.grid_points, "Curve grid points");
  report->callback([&] { action = [&] { cmd_report(*report, ra); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  try {
    action();
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
}

}  // namespace edgeimp::cli
