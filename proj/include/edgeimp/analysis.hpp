#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edgeimp/evolution.hpp"
#include "edgeimp/kernels.hpp"
#include "edgeimp/spectral.hpp"

namespace edgeimp {

/// Silverman's rule of thumb h = 0.9 min(σ, IQR/1.34) n^{-1/5}. When one
/// spread measure is zero the other is used; when both are zero h = 1.
double silverman_bandwidth(std::span<const double> samples);

/// Linear interpolation quantile (type 7) of an unsorted sample.
double quantile(std::span<const double> samples, double q);

/// Gaussian kernel density estimate.
struct KdeModel {
  std::vector<double> samples;
  double bandwidth = 1.0;
};

/// Throws DataError on an empty sample or a non-positive bandwidth.
KdeModel kde_fit(std::span<const double> samples, std::optional<double> bandwidth = std::nullopt);
double kde_eval(const KdeModel& m, double x);
std::vector<double> kde_eval(const KdeModel& m, std::span<const double> grid, Exec exec = Exec::parallel);

/// `points` equally spaced values from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t points);
/// Grid spanning the sample padded by `pad` bandwidths on each side.
std::vector<double> kde_grid(const KdeModel& m, std::size_t points, double pad = 3.0);
double trapezoid(std::span<const double> x, std::span<const double> y);

/// P(no change | ln l_e) on a grid.
struct ConditionalCurve {
  std::vector<double> grid;
  std::vector<double> p_no_change;
  std::vector<double> support;  ///< records within one bandwidth of each grid point
  double bandwidth = 0.0;
  std::size_t changed = 0;
  std::size_t unchanged = 0;
  bool degenerate = false;  ///< one class is empty; the curve is constant
};

/// Class-conditional KDE with Bayes' rule. Both classes share one bandwidth,
/// so the estimate is Σ_unchanged K / Σ_all K and lies in [0, 1]. Where every
/// kernel underflows the overall prior is returned. An empty `grid` spans the
/// sample range with 101 points.
ConditionalCurve conditional_no_change(std::span<const double> log_l, std::span<const std::uint8_t> changed,
                                       std::span<const double> grid = {},
                                       std::optional<double> bandwidth = std::nullopt, Exec exec = Exec::parallel);

struct BinnedCurve {
  std::vector<double> lower, upper;
  std::vector<double> p_no_change;
  std::vector<std::size_t> count;
};

/// Equal-width bins over the sample range; empty bins report NaN.
BinnedCurve conditional_no_change_binned(std::span<const double> log_l, std::span<const std::uint8_t> changed,
                                         std::size_t bins);

struct BinStat {
  double lower = 0.0, upper = 0.0;
  double center = 0.0;  ///< mean ln l_e in the bin
  std::size_t count = 0;
  double std_dev = 0.0;  ///< sample standard deviation of ln(1 + ΔA)
};

struct JointDistribution {
  std::vector<double> log_l_grid;
  std::vector<double> y_grid;     ///< ln(1 + ΔA)
  std::vector<double> density;    ///< row-major, y_grid.size() rows
  double bandwidth_log_l = 0.0;
  double bandwidth_y = 0.0;
  std::vector<BinStat> bins;      ///< equal-count bins of ln l_e
  double slope = 0.0;             ///< OLS slope of bin std against bin center
  double slope_ci_low = 0.0, slope_ci_high = 0.0;  ///< 95%, Student-t
  double bin_spearman = 0.0;      ///< Spearman(bin index, bin std)
  std::size_t used = 0;
  std::size_t excluded_new = 0;       ///< ΔA = +inf
  std::size_t excluded_vanishing = 0; ///< ΔA = -1
};

struct JointOptions {
  std::size_t grid_points = 50;
  std::size_t bins = 10;
  Exec exec = Exec::parallel;
};

/// Product-kernel KDE of (ln l_e, ln(1+ΔA)) over changed records plus per-bin
/// spread. Throws DataError when fewer than 2 usable changed records remain.
JointDistribution joint_change_distribution(std::span<const ChangeRecord> records, const JointOptions& opts = {});

/// Per-bin statistics only (no density), from raw (ln l_e, y) pairs.
std::vector<BinStat> bin_spread(std::span<const double> log_l, std::span<const double> y, std::size_t bins);

/// Average ranks (1-based) with ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> xs);

/// Pearson correlation of average ranks. Throws DataError for mismatched
/// lengths, fewer than 2 points, or a constant input.
double spearman(std::span<const double> xs, std::span<const double> ys);

struct CorrelateRow {
  std::string name;
  double spearman = 0.0;
  std::size_t n = 0;
};

/// Spearman(l_e, ·) pooled over every transition of an undirected network:
/// weight, ΔA, edge betweenness, degree product, strength product. All
/// columns use edges of the giant component of snapshot t; ΔA uses
/// persistent edges only.
std::vector<CorrelateRow> importance_correlates(const TemporalNetwork& net, double tol = 1e-12,
                                                const SolverOptions& solver = {});

struct KsResult {
  double statistic = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

/// Kolmogorov–Smirnov distance between the sample and a normal with the
/// sample mean and standard deviation.
KsResult ks_normal(std::span<const double> samples);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;  ///< two-sided
};

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

struct Summary {
  std::size_t n = 0;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
};

/// Box-plot summary. Throws DataError on an empty sample.
Summary summarize(std::span<const double> samples);

}  // namespace edgeimp
