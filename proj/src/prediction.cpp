#include "edgeimp/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "edgeimp/error.hpp"

namespace edgeimp {

namespace {

void check_labels(std::span<const double> scores, std::span<const std::uint8_t> labels, std::size_t& pos,
                  std::size_t& neg) {
  if (scores.size() != labels.size()) throw DataError("scores and labels differ in length");
  pos = 0;
  for (auto l : labels) pos += l ? 1 : 0;
  neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw DataError("metric needs both classes present");
}

// Indices sorted by descending score; equal scores form one threshold group.
std::vector<std::size_t> descending(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

MetricSummary summarize_trials(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, mean - 1.96 * sd, mean + 1.96 * sd};
}

}  // namespace

std::vector<LabeledExample> examples_from_records(std::span<const ChangeRecord> records) {
  std::vector<LabeledExample> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (!r.persistent()) continue;
    if (!(r.l_e > 0.0)) throw DataError("change record with non-positive l_e");
    out.push_back({std::log(r.l_e), static_cast<std::uint8_t>(r.changed ? 1 : 0)});
  }
  return out;
}

Split stratified_split(std::span<const LabeledExample> examples, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw DataError("test fraction must lie in (0, 1)");
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < examples.size(); ++i) by_class[examples[i].label ? 1 : 0].push_back(i);
  if (by_class[0].size() < 2 || by_class[1].size() < 2)
    throw DataError("stratified split needs at least 2 examples of each class");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x73706c74u};
  std::mt19937_64 rng(seq);
  std::vector<std::uint8_t> in_test(examples.size(), 0);
  for (auto& idx : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    auto k = static_cast<std::size_t>(std::llround(static_cast<double>(idx.size()) * test_fraction));
    k = std::clamp<std::size_t>(k, 1, idx.size() - 1);
    for (std::size_t j = 0; j < k; ++j) in_test[idx[j]] = 1;
  }
  Split out;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (in_test[i]) {
      out.test.push_back(examples[i]);
      out.test_index.push_back(i);
    } else {
      out.train.push_back(examples[i]);
      out.train_index.push_back(i);
    }
  }
  return out;
}

double LogisticModel::probability(double x) const {
  const double z = score(x);
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

LogisticModel fit_logistic(std::span<const LabeledExample> train) {
  std::size_t pos = 0;
  for (const auto& e : train) {
    if (!std::isfinite(e.x)) throw DataError("logistic regression: non-finite feature");
    pos += e.label ? 1 : 0;
  }
  if (pos == 0 || pos == train.size()) throw DataError("logistic regression needs both classes in training data");
  const double n = static_cast<double>(train.size());
  LogisticModel m;
  for (const auto& e : train) m.feature_mean += e.x;
  m.feature_mean /= n;
  double ss = 0.0;
  for (const auto& e : train) ss += (e.x - m.feature_mean) * (e.x - m.feature_mean);
  m.feature_sd = std::sqrt(ss / n);
  if (!(m.feature_sd > 0.0)) m.feature_sd = 1.0;

  std::vector<double> u(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) u[i] = (train[i].x - m.feature_mean) / m.feature_sd;

  // Loss in (w, b) on the standardized feature; log(1 + e^z) computed stably.
  auto softplus = [](double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); };
  auto loss = [&](double w, double b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double z = w * u[i] + b;
      acc += softplus(z) - (train[i].label ? z : 0.0);
    }
    return acc / n + 0.5 * kLogisticL2 * w * w;
  };
  const double prior = static_cast<double>(pos) / n;
  double w = 0.0, b = std::log(prior / (1.0 - prior));
  for (int it = 0; it < 200; ++it) {
    double gw = 0.0, gb = 0.0, hww = 0.0, hwb = 0.0, hbb = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double z = w * u[i] + b;
      const double p = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
      const double r = p - (train[i].label ? 1.0 : 0.0);
      const double v = p * (1.0 - p);
      gw += r * u[i];
      gb += r;
      hww += v * u[i] * u[i];
      hwb += v * u[i];
      hbb += v;
    }
    gw = gw / n + kLogisticL2 * w;
    gb /= n;
    hww = hww / n + kLogisticL2;
    hwb /= n;
    hbb /= n;
    m.iterations = it + 1;
    m.gradient_norm = std::hypot(gw, gb);
    if (m.gradient_norm < 1e-8) {
      m.converged = true;
      break;
    }
    double det = hww * hbb - hwb * hwb;
    double dw, db;
    if (det > 1e-300 && hbb > 0.0) {
      dw = -(hbb * gw - hwb * gb) / det;
      db = -(hww * gb - hwb * gw) / det;
    } else {
      dw = -gw;
      db = -gb;
    }
    const double f0 = loss(w, b);
    const double slope = gw * dw + gb * db;
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
      if (loss(w + step * dw, b + step * db) <= f0 + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    w += step * dw;
    b += step * db;
  }
  m.w = w / m.feature_sd;
  m.b = b - w * m.feature_mean / m.feature_sd;
  return m;
}

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels, std::vector<CurvePoint>* curve) {
  std::size_t pos, neg;
  check_labels(scores, labels, pos, neg);
  const auto order = descending(scores);
  double tp = 0.0, fp = 0.0, area = 0.0;
  double prev_tpr = 0.0, prev_fpr = 0.0;
  if (curve) curve->assign(1, {0.0, 0.0});
  for (std::size_t k = 0; k < order.size();) {
    std::size_t end = k;
    while (end < order.size() && scores[order[end]] == scores[order[k]]) {
      (labels[order[end]] ? tp : fp) += 1.0;
      ++end;
    }
    const double tpr = tp / static_cast<double>(pos), fpr = fp / static_cast<double>(neg);
    area += 0.5 * (fpr - prev_fpr) * (tpr + prev_tpr);
    if (curve) curve->push_back({fpr, tpr});
    prev_tpr = tpr;
    prev_fpr = fpr;
    k = end;
  }
  return area;
}

double pr_auc(std::span<const double> scores, std::span<const std::uint8_t> labels, std::vector<CurvePoint>* curve) {
  std::size_t pos, neg;
  check_labels(scores, labels, pos, neg);
  const auto order = descending(scores);
  double tp = 0.0, fp = 0.0, area = 0.0, prev_recall = 0.0;
  if (curve) curve->assign(1, {0.0, 1.0});
  for (std::size_t k = 0; k < order.size();) {
    std::size_t end = k;
    while (end < order.size() && scores[order[end]] == scores[order[k]]) {
      (labels[order[end]] ? tp : fp) += 1.0;
      ++end;
    }
    const double recall = tp / static_cast<double>(pos);
    const double precision = tp / (tp + fp);
    area += (recall - prev_recall) * precision;
    if (curve) curve->push_back({recall, precision});
    prev_recall = recall;
    k = end;
  }
  return area;
}

double balanced_accuracy(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> labels) {
  if (predicted.size() != labels.size()) throw DataError("predictions and labels differ in length");
  double tp = 0, pos = 0, tn = 0, neg = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) {
      ++pos;
      tp += predicted[i] ? 1 : 0;
    } else {
      ++neg;
      tn += predicted[i] ? 0 : 1;
    }
  }
  if (pos == 0 || neg == 0) throw DataError("balanced accuracy needs both classes present");
  return 0.5 * (tp / pos + tn / neg);
}

EvalReport evaluate(const LogisticModel& model, std::span<const LabeledExample> test, const EvalOptions& opts) {
  if (test.empty()) throw DataError("evaluation needs a non-empty test set");
  if (opts.dummy_trials < 1) throw DataError("dummy trial count must be positive");
  if (!(opts.train_prior >= 0.0 && opts.train_prior <= 1.0)) throw DataError("train prior must lie in [0, 1]");
  std::vector<double> scores(test.size());
  std::vector<std::uint8_t> labels(test.size()), hard(test.size());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    scores[i] = model.score(test[i].x);
    labels[i] = test[i].label;
    hard[i] = scores[i] >= 0.0 ? 1 : 0;  // probability >= 0.5
    pos += labels[i];
  }
  if (pos == 0 || pos == test.size()) throw DataError("evaluation needs both classes in the test set");
  EvalReport r;
  r.n_test = test.size();
  r.n_train = opts.n_train;
  r.train_prior = opts.train_prior;
  r.test_prior = static_cast<double>(pos) / static_cast<double>(test.size());
  r.roc_auc = roc_auc(scores, labels, &r.roc_curve);
  r.pr_auc = pr_auc(scores, labels, &r.pr_curve);
  r.balanced_accuracy = balanced_accuracy(hard, labels);

  std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32), 0x64756dU};
  std::mt19937_64 rng(seq);
  std::bernoulli_distribution coin(opts.train_prior);
  std::vector<double> ba, roc, pr;
  std::vector<double> dummy_scores(test.size());
  std::vector<std::uint8_t> dummy_hard(test.size());
  for (int trial = 0; trial < opts.dummy_trials; ++trial) {
    for (std::size_t i = 0; i < test.size(); ++i) {
      dummy_hard[i] = coin(rng) ? 1 : 0;
      dummy_scores[i] = dummy_hard[i];
    }
    ba.push_back(balanced_accuracy(dummy_hard, labels));
    roc.push_back(roc_auc(dummy_scores, labels));
    pr.push_back(pr_auc(dummy_scores, labels));
  }
  r.dummy_balanced_accuracy = summarize_trials(ba);
  r.dummy_roc_auc = summarize_trials(roc);
  r.dummy_pr_auc = summarize_trials(pr);
  return r;
}

EvalReport split_fit_evaluate(std::span<const LabeledExample> examples, double test_fraction, int dummy_trials,
                              std::uint64_t seed) {
  const Split split = stratified_split(examples, test_fraction, seed);
  const LogisticModel model = fit_logistic(split.train);
  std::size_t pos = 0;
  for (const auto& e : split.train) pos += e.label;
  EvalOptions eo;
  eo.dummy_trials = dummy_trials;
  eo.seed = seed;
  eo.train_prior = static_cast<double>(pos) / static_cast<double>(split.train.size());
  eo.n_train = split.train.size();
  return evaluate(model, split.test, eo);
}

std::vector<SweepCell> predictability_sweep(const SweepOptions& opts) {
  if (opts.alphas.empty() || opts.rhos.empty() || opts.seeds.empty())
    throw DataError("sweep needs at least one alpha, rho and seed");
  const std::size_t n_cells = opts.alphas.size() * opts.rhos.size();
  const std::size_t n_seeds = opts.seeds.size();
  struct Run {
    bool ok = false;
    double improvement = 0.0, pr = 0.0, dummy_pr = 0.0;
    std::string error;
  };
  std::vector<Run> runs(n_cells * n_seeds);
  SimulationOptions sim;
  sim.solver = opts.solver;
  sim.solver.exec = Exec::serial;  // parallelism lives at the cell level

  auto run_one = [&](std::size_t job) {
    const std::size_t cell = job / n_seeds, s = job % n_seeds;
    const double alpha = opts.alphas[cell / opts.rhos.size()];
    const double rho = opts.rhos[cell % opts.rhos.size()];
    Run& run = runs[job];
    try {
      GeneratorSpec spec = opts.base;
      spec.seed = opts.seeds[s];
      const auto base = generate(spec);
      const EvolutionParams p{alpha, rho, opts.beta, opts.gamma, {}, {}, {}, {}};
      const auto result = simulate(base.graph, p, opts.steps, opts.seeds[s], 0, sim);
      const auto examples = examples_from_records(result.records);
      const auto report = split_fit_evaluate(examples, opts.test_fraction, opts.dummy_trials, opts.seeds[s]);
      run.ok = true;
      run.pr = report.pr_auc;
      run.dummy_pr = report.dummy_pr_auc.mean;
      run.improvement = report.pr_auc_improvement();
    } catch (const std::exception& e) {
      run.error = e.what();
    }
  };
  const std::size_t jobs = runs.size();
  if (opts.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t j = 0; j < jobs; ++j) run_one(j);
  } else {
    for (std::size_t j = 0; j < jobs; ++j) run_one(j);
  }

  std::vector<SweepCell> out;
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    SweepCell c;
    c.alpha = opts.alphas[cell / opts.rhos.size()];
    c.rho = opts.rhos[cell % opts.rhos.size()];
    std::string first_error;
    for (std::size_t s = 0; s < n_seeds; ++s) {
      const Run& run = runs[cell * n_seeds + s];
      if (!run.ok) {
        if (first_error.empty()) first_error = run.error;
        continue;
      }
      c.improvements.push_back(run.improvement);
      c.mean_pr_auc += run.pr;
      c.mean_dummy_pr_auc += run.dummy_pr;
    }
    if (c.improvements.empty()) {
      c.skipped = first_error.empty() ? "no successful run" : first_error;
      out.push_back(c);
      continue;
    }
    const double k = static_cast<double>(c.improvements.size());
    c.mean_pr_auc /= k;
    c.mean_dummy_pr_auc /= k;
    for (double v : c.improvements) c.mean_improvement += v;
    c.mean_improvement /= k;
    double ss = 0.0;
    for (double v : c.improvements) ss += (v - c.mean_improvement) * (v - c.mean_improvement);
    const double se = k > 1 ? std::sqrt(ss / (k - 1.0) / k) : 0.0;
    c.ci_low = c.mean_improvement - 1.96 * se;
    c.ci_high = c.mean_improvement + 1.96 * se;
    out.push_back(c);
  }
  return out;
}

}  // namespace edgeimp
