#include "edgeimp/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "edgeimp/error.hpp"
#include "edgeimp/importance.hpp"

namespace edgeimp {

namespace {

double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const double ma = mean_of(a), mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

void require_finite(std::span<const double> xs, const char* what) {
  for (double x : xs)
    if (!std::isfinite(x)) throw DataError(std::string(what) + ": non-finite value");
}

}  // namespace

double quantile(std::span<const double> samples, double q) {
  if (samples.empty()) throw DataError("quantile of an empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double silverman_bandwidth(std::span<const double> samples) {
  if (samples.empty()) throw DataError("bandwidth of an empty sample");
  const double sd = sample_sd(samples);
  const double iqr = samples.size() > 1 ? (quantile(samples, 0.75) - quantile(samples, 0.25)) / 1.34 : 0.0;
  double spread = std::min(sd, iqr);
  if (!(spread > 0.0)) spread = std::max(sd, iqr);
  if (!(spread > 0.0)) return 1.0;
  return 0.9 * spread * std::pow(static_cast<double>(samples.size()), -0.2);
}

KdeModel kde_fit(std::span<const double> samples, std::optional<double> bandwidth) {
  if (samples.empty()) throw DataError("kernel density estimate of an empty sample");
  require_finite(samples, "kde_fit");
  const double h = bandwidth ? *bandwidth : silverman_bandwidth(samples);
  if (!(h > 0.0) || !std::isfinite(h)) throw DataError("bandwidth must be positive");
  return {std::vector<double>(samples.begin(), samples.end()), h};
}

double kde_eval(const KdeModel& m, double x) {
  double out = 0.0;
  kernels::gaussian_kde(m.samples, m.bandwidth, std::span<const double>(&x, 1), std::span<double>(&out, 1),
                        Exec::serial);
  return out;
}

std::vector<double> kde_eval(const KdeModel& m, std::span<const double> grid, Exec exec) {
  std::vector<double> out(grid.size());
  kernels::gaussian_kde(m.samples, m.bandwidth, grid, out, exec);
  return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points < 2) throw DataError("grid needs at least 2 points");
  if (!(hi >= lo)) throw DataError("grid upper bound below lower bound");
  std::vector<double> g(points);
  for (std::size_t k = 0; k < points; ++k)
    g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
  g.back() = hi;
  return g;
}

std::vector<double> kde_grid(const KdeModel& m, std::size_t points, double pad) {
  const auto [lo, hi] = std::minmax_element(m.samples.begin(), m.samples.end());
  return linear_grid(*lo - pad * m.bandwidth, *hi + pad * m.bandwidth, points);
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("trapezoid: size mismatch");
  double acc = 0.0;
  for (std::size_t k = 1; k < x.size(); ++k) acc += 0.5 * (x[k] - x[k - 1]) * (y[k] + y[k - 1]);
  return acc;
}

ConditionalCurve conditional_no_change(std::span<const double> log_l, std::span<const std::uint8_t> changed,
                                       std::span<const double> grid, std::optional<double> bandwidth, Exec exec) {
  if (log_l.empty()) throw DataError("conditional curve of an empty record set");
  if (log_l.size() != changed.size()) throw DataError("conditional curve: size mismatch");
  require_finite(log_l, "conditional_no_change");
  ConditionalCurve out;
  out.bandwidth = bandwidth ? *bandwidth : silverman_bandwidth(log_l);
  if (!(out.bandwidth > 0.0)) throw DataError("bandwidth must be positive");
  if (grid.empty()) {
    const auto [lo, hi] = std::minmax_element(log_l.begin(), log_l.end());
    out.grid = linear_grid(*lo, *hi, 101);
  } else {
    out.grid.assign(grid.begin(), grid.end());
  }
  for (auto k : changed) (k ? out.changed : out.unchanged)++;
  out.degenerate = out.changed == 0 || out.unchanged == 0;
  const double prior = static_cast<double>(out.unchanged) / static_cast<double>(log_l.size());

  std::vector<std::uint8_t> unchanged(changed.size());
  for (std::size_t i = 0; i < changed.size(); ++i) unchanged[i] = changed[i] ? 0 : 1;
  std::vector<double> total(out.grid.size()), chosen(out.grid.size());
  kernels::gaussian_kernel_mass(log_l, unchanged, out.bandwidth, out.grid, total, chosen, exec);
  out.p_no_change.resize(out.grid.size());
  out.support.resize(out.grid.size());
  for (std::size_t g = 0; g < out.grid.size(); ++g) {
    out.p_no_change[g] = total[g] > 0.0 ? std::clamp(chosen[g] / total[g], 0.0, 1.0) : prior;
    std::size_t near = 0;
    for (double l : log_l) near += std::abs(l - out.grid[g]) <= out.bandwidth ? 1 : 0;
    out.support[g] = static_cast<double>(near);
  }
  return out;
}

BinnedCurve conditional_no_change_binned(std::span<const double> log_l, std::span<const std::uint8_t> changed,
                                         std::size_t bins) {
  if (log_l.empty()) throw DataError("binned curve of an empty record set");
  if (log_l.size() != changed.size()) throw DataError("binned curve: size mismatch");
  if (bins == 0) throw DataError("binned curve needs at least one bin");
  require_finite(log_l, "conditional_no_change_binned");
  const auto [lo_it, hi_it] = std::minmax_element(log_l.begin(), log_l.end());
  const double lo = *lo_it, hi = *hi_it;
  const double width = (hi - lo) / static_cast<double>(bins);
  BinnedCurve out;
  std::vector<std::size_t> unchanged(bins, 0);
  out.count.assign(bins, 0);
  for (std::size_t b = 0; b < bins; ++b) {
    out.lower.push_back(lo + width * static_cast<double>(b));
    out.upper.push_back(b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1));
  }
  for (std::size_t i = 0; i < log_l.size(); ++i) {
    std::size_t b = width > 0.0 ? static_cast<std::size_t>((log_l[i] - lo) / width) : 0;
    b = std::min(b, bins - 1);
    ++out.count[b];
    if (!changed[i]) ++unchanged[b];
  }
  for (std::size_t b = 0; b < bins; ++b)
    out.p_no_change.push_back(out.count[b] ? static_cast<double>(unchanged[b]) / static_cast<double>(out.count[b])
                                           : std::numeric_limits<double>::quiet_NaN());
  return out;
}

std::vector<BinStat> bin_spread(std::span<const double> log_l, std::span<const double> y, std::size_t bins) {
  if (log_l.size() != y.size()) throw DataError("bin_spread: size mismatch");
  if (bins == 0 || log_l.size() < 2 * bins) throw DataError("bin_spread needs at least 2 records per bin");
  std::vector<std::size_t> order(log_l.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return log_l[a] < log_l[b]; });
  std::vector<BinStat> out;
  const std::size_t n = order.size();
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t first = b * n / bins, last = (b + 1) * n / bins;
    std::vector<double> ys, ls;
    for (std::size_t k = first; k < last; ++k) {
      ys.push_back(y[order[k]]);
      ls.push_back(log_l[order[k]]);
    }
    BinStat st;
    st.lower = ls.front();
    st.upper = ls.back();
    st.center = mean_of(ls);
    st.count = ys.size();
    st.std_dev = sample_sd(ys);
    out.push_back(st);
  }
  return out;
}

JointDistribution joint_change_distribution(std::span<const ChangeRecord> records, const JointOptions& opts) {
  JointDistribution out;
  std::vector<double> ls, ys;
  for (const auto& r : records) {
    if (!r.changed) continue;
    if (r.new_edge || r.rel_change == std::numeric_limits<double>::infinity()) {
      ++out.excluded_new;
      continue;
    }
    if (r.vanished_edge || r.rel_change <= -1.0) {
      ++out.excluded_vanishing;
      continue;
    }
    if (!(r.l_e > 0.0)) throw DataError("change record with non-positive l_e");
    ls.push_back(std::log(r.l_e));
    ys.push_back(std::log1p(r.rel_change));
  }
  out.used = ls.size();
  if (ls.size() < 2) throw DataError("joint distribution needs at least 2 changed records");

  const auto kx = kde_fit(ls);
  const auto ky = kde_fit(ys);
  out.bandwidth_log_l = kx.bandwidth;
  out.bandwidth_y = ky.bandwidth;
  out.log_l_grid = kde_grid(kx, opts.grid_points);
  out.y_grid = kde_grid(ky, opts.grid_points);

  // density = Ky * Kx^T / n with Gaussian kernel matrices over sample blocks.
  const auto nx = static_cast<Eigen::Index>(out.log_l_grid.size());
  const auto ny = static_cast<Eigen::Index>(out.y_grid.size());
  Eigen::MatrixXd dens = Eigen::MatrixXd::Zero(ny, nx);
  const std::size_t block = kernels::kReductionBlock;
  const double cx = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * kx.bandwidth);
  const double cy = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * ky.bandwidth);
  for (std::size_t first = 0; first < ls.size(); first += block) {
    const std::size_t m = std::min(block, ls.size() - first);
    Eigen::MatrixXd a(ny, static_cast<Eigen::Index>(m)), b(nx, static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
      const auto col = static_cast<Eigen::Index>(i);
      for (Eigen::Index g = 0; g < ny; ++g) {
        const double z = (out.y_grid[static_cast<std::size_t>(g)] - ys[first + i]) / ky.bandwidth;
        a(g, col) = cy * std::exp(-0.5 * z * z);
      }
      for (Eigen::Index g = 0; g < nx; ++g) {
        const double z = (out.log_l_grid[static_cast<std::size_t>(g)] - ls[first + i]) / kx.bandwidth;
        b(g, col) = cx * std::exp(-0.5 * z * z);
      }
    }
    dens.noalias() += a * b.transpose();
  }
  dens /= static_cast<double>(ls.size());
  out.density.resize(static_cast<std::size_t>(nx * ny));
  for (Eigen::Index r = 0; r < ny; ++r)
    for (Eigen::Index c = 0; c < nx; ++c) out.density[static_cast<std::size_t>(r * nx + c)] = dens(r, c);

  const std::size_t bins = std::min(opts.bins, ls.size() / 2);
  out.bins = bin_spread(ls, ys, std::max<std::size_t>(bins, 1));
  if (out.bins.size() >= 3) {
    std::vector<double> cxs, sds, idx;
    for (std::size_t b = 0; b < out.bins.size(); ++b) {
      cxs.push_back(out.bins[b].center);
      sds.push_back(out.bins[b].std_dev);
      idx.push_back(static_cast<double>(b));
    }
    const double mx = mean_of(cxs), my = mean_of(sds);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t b = 0; b < cxs.size(); ++b) {
      sxx += (cxs[b] - mx) * (cxs[b] - mx);
      sxy += (cxs[b] - mx) * (sds[b] - my);
    }
    out.slope = sxy / sxx;
    double sse = 0.0;
    for (std::size_t b = 0; b < cxs.size(); ++b) {
      const double r = sds[b] - my - out.slope * (cxs[b] - mx);
      sse += r * r;
    }
    const double dof = static_cast<double>(cxs.size() - 2);
    const double se = std::sqrt(sse / dof / sxx);
    const double tq = boost::math::quantile(boost::math::students_t(dof), 0.975);
    out.slope_ci_low = out.slope - tq * se;
    out.slope_ci_high = out.slope + tq * se;
    const bool constant = std::all_of(sds.begin(), sds.end(), [&](double v) { return v == sds.front(); });
    out.bin_spearman = constant ? 0.0 : spearman(idx, sds);
  }
  return out;
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t k = 0; k < order.size();) {
    std::size_t end = k + 1;
    while (end < order.size() && xs[order[end]] == xs[order[k]]) ++end;
    const double avg = 0.5 * static_cast<double>(k + end - 1) + 1.0;
    for (std::size_t j = k; j < end; ++j) ranks[order[j]] = avg;
    k = end;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DataError("spearman: length mismatch");
  if (xs.size() < 2) throw DataError("spearman needs at least 2 points");
  require_finite(xs, "spearman");
  require_finite(ys, "spearman");
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (constant(xs) || constant(ys)) throw DataError("spearman is undefined for a constant input");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  return pearson(rx, ry);
}

std::vector<CorrelateRow> importance_correlates(const TemporalNetwork& net, double tol, const SolverOptions& solver) {
  if (net.size() < 2) throw DataError("importance correlates need at least 2 snapshots");
  if (net.directed()) throw DataError("importance correlates are defined for undirected networks");
  std::vector<double> le, weight, betw, degp, strp;
  std::vector<double> le_delta, delta;
  for (std::size_t t = 0; t + 1 < net.size(); ++t) {
    std::vector<Edge> present;
    for (const auto& e : net.snapshot(t).edges())
      if (e.weight > 0.0) present.push_back(e);
    const Snapshot cur(net.num_nodes(), false, net.snapshot(t).timestamp(), std::move(present));
    if (cur.num_edges() == 0) continue;
    const Snapshot gc = giant_component(cur);
    const auto ep = leading_eigenpair(gc, solver);
    const auto bc = edge_betweenness(gc);
    const auto ds = degrees_strengths(gc);
    const auto edges = gc.edges();
    const Snapshot& next = net.snapshot(t + 1);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const auto& e = edges[k];
      if (e.key.is_loop()) continue;
      const double l = pair_importance(ep, e.key.i, e.key.j);
      le.push_back(l);
      weight.push_back(e.weight);
      betw.push_back(bc[k]);
      degp.push_back(static_cast<double>(ds[e.key.i].degree) * static_cast<double>(ds[e.key.j].degree));
      strp.push_back(ds[e.key.i].strength * ds[e.key.j].strength);
      const EdgeKey orig{gc.origin(e.key.i), gc.origin(e.key.j)};
      const double w_next = next.weight(orig).value_or(0.0);
      if (w_next > 0.0) {
        double rel = w_next / e.weight - 1.0;
        if (std::abs(rel) <= tol) rel = 0.0;
        le_delta.push_back(l);
        delta.push_back(rel);
      }
    }
  }
  auto row = [](std::string name, std::span<const double> a, std::span<const double> b) {
    CorrelateRow r{std::move(name), std::numeric_limits<double>::quiet_NaN(), a.size()};
    try {
      r.spearman = spearman(a, b);
    } catch (const DataError&) {
      // Undefined (constant column); reported as NaN.
    }
    return r;
  };
  return {row("weight", le, weight), row("delta_a", le_delta, delta), row("edge_betweenness", le, betw),
          row("degree_product", le, degp), row("strength_product", le, strp)};
}

KsResult ks_normal(std::span<const double> samples) {
  if (samples.size() < 2) throw DataError("Kolmogorov-Smirnov test needs at least 2 samples");
  require_finite(samples, "ks_normal");
  KsResult out;
  out.n = samples.size();
  out.mean = mean_of(samples);
  out.sd = sample_sd(samples);
  if (!(out.sd > 0.0)) throw DataError("Kolmogorov-Smirnov test of a constant sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-(s[i] - out.mean) / (out.sd * std::numbers::sqrt2));
    out.statistic = std::max({out.statistic, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return out;
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw DataError("Welch t-test needs at least 2 samples per group");
  const double va = std::pow(sample_sd(a), 2) / static_cast<double>(a.size());
  const double vb = std::pow(sample_sd(b), 2) / static_cast<double>(b.size());
  if (!(va + vb > 0.0)) throw DataError("Welch t-test of two constant samples");
  WelchResult out;
  out.t = (mean_of(a) - mean_of(b)) / std::sqrt(va + vb);
  out.df = (va + vb) * (va + vb) /
           (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
  out.p_value = 2.0 * boost::math::cdf(boost::math::complement(boost::math::students_t(out.df), std::abs(out.t)));
  return out;
}

Summary summarize(std::span<const double> samples) {
  if (samples.empty()) throw DataError("summary of an empty sample");
  Summary s;
  s.n = samples.size();
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  s.min = *lo;
  s.max = *hi;
  s.q1 = quantile(samples, 0.25);
  s.median = quantile(samples, 0.5);
  s.q3 = quantile(samples, 0.75);
  s.mean = mean_of(samples);
  return s;
}

}  // namespace edgeimp
