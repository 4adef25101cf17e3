#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "edgeimp/evolution.hpp"
#include "edgeimp/generators.hpp"
#include "edgeimp/kernels.hpp"

namespace edgeimp {

/// Feature x = ln l_e and label 1 when the edge changed.
struct LabeledExample {
  double x = 0.0;
  std::uint8_t label = 0;
};

/// Examples from persistent records (new and vanished edges are skipped).
std::vector<LabeledExample> examples_from_records(std::span<const ChangeRecord> records);

struct Split {
  std::vector<LabeledExample> train, test;
  std::vector<std::size_t> train_index, test_index;  ///< positions in the input, ascending
};

/// Per class, round(n_c * test_fraction) examples (at least 1, at most n_c - 1)
/// go to the test set. Throws DataError unless both classes have >= 2 examples.
Split stratified_split(std::span<const LabeledExample> examples, double test_fraction, std::uint64_t seed);

/// One-feature logistic regression; coefficients in the original feature scale.
struct LogisticModel {
  double w = 0.0;
  double b = 0.0;
  double feature_mean = 0.0;
  double feature_sd = 1.0;
  int iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;

  double score(double x) const { return w * x + b; }
  double probability(double x) const;
};

inline constexpr double kLogisticL2 = 1e-6;

/// Newton's method on mean log-loss + (1e-6/2) w² over the standardized
/// feature, until the gradient norm is below 1e-8.
LogisticModel fit_logistic(std::span<const LabeledExample> train);

struct CurvePoint {
  double x = 0.0;  ///< false-positive rate (ROC) or recall (PR)
  double y = 0.0;  ///< true-positive rate (ROC) or precision (PR)
};

/// Trapezoid ROC over unique score thresholds; ties count one half.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels,
               std::vector<CurvePoint>* curve = nullptr);
/// Average precision (step interpolation) over unique score thresholds.
double pr_auc(std::span<const double> scores, std::span<const std::uint8_t> labels,
              std::vector<CurvePoint>* curve = nullptr);
/// Mean per-class recall of the hard predictions.
double balanced_accuracy(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> labels);

struct MetricSummary {
  double mean = 0.0;
  double ci_low = 0.0, ci_high = 0.0;  ///< mean ± 1.96 sd over trials
};

struct EvalReport {
  double balanced_accuracy = 0.0;
  double roc_auc = 0.0;
  double pr_auc = 0.0;
  std::vector<CurvePoint> roc_curve, pr_curve;
  MetricSummary dummy_balanced_accuracy, dummy_roc_auc, dummy_pr_auc;
  std::size_t n_train = 0, n_test = 0;
  double train_prior = 0.0, test_prior = 0.0;

  double pr_auc_improvement() const { return pr_auc - dummy_pr_auc.mean; }
};

struct EvalOptions {
  int dummy_trials = 100;
  std::uint64_t seed = 0;
  double train_prior = 0.5;  ///< change rate the stratified dummy draws with
  std::size_t n_train = 0;
};

/// Scores the test set with the model's linear predictor and compares it to a
/// stratified random 0/1 scorer. Throws DataError on a single-class test set.
EvalReport evaluate(const LogisticModel& model, std::span<const LabeledExample> test, const EvalOptions& opts);

/// Split, fit and evaluate in one call.
EvalReport split_fit_evaluate(std::span<const LabeledExample> examples, double test_fraction, int dummy_trials,
                              std::uint64_t seed);

struct SweepOptions {
  GeneratorSpec base;  ///< its seed is replaced by each run seed
  std::vector<double> alphas;
  std::vector<double> rhos;
  double beta = 0.0;
  double gamma = 0.0;
  std::size_t steps = 100;
  std::vector<std::uint64_t> seeds;
  double test_fraction = 0.2;
  int dummy_trials = 100;
  SolverOptions solver;
  Exec exec = Exec::parallel;
};

struct SweepCell {
  double alpha = 0.0;
  double rho = 0.0;
  std::vector<double> improvements;  ///< one per successful seed
  double mean_improvement = 0.0;
  double ci_low = 0.0, ci_high = 0.0;  ///< mean ± 1.96 sd / sqrt(runs)
  double mean_pr_auc = 0.0;
  double mean_dummy_pr_auc = 0.0;
  std::string skipped;  ///< reason when no seed produced a result
};

/// For every (α, ρ) and seed: generate the base graph, simulate, split, fit,
/// evaluate; improvement = PR-AUC − dummy mean PR-AUC. Cells run in parallel.
std::vector<SweepCell> predictability_sweep(const SweepOptions& opts);

}  // namespace edgeimp
