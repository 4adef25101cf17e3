#include "edgeimp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "edgeimp/error.hpp"

namespace edgeimp {

CsrMatrix adjacency_matrix(const Snapshot& s) {
  const std::size_t n = s.num_nodes();
  CsrMatrix m;
  m.rows = m.cols = n;
  std::vector<std::size_t> count(n + 1, 0);
  for (const auto& e : s.edges()) {
    ++count[e.key.i + 1];
    if (!s.directed() && !e.key.is_loop()) ++count[e.key.j + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  m.row_ptr = count;
  m.col.resize(count.back());
  m.val.resize(count.back());
  std::vector<std::size_t> fill(count.begin(), count.end() - 1);
  for (const auto& e : s.edges()) {
    std::size_t p = fill[e.key.i]++;
    m.col[p] = e.key.j;
    m.val[p] = e.weight;
    if (!s.directed() && !e.key.is_loop()) {
      p = fill[e.key.j]++;
      m.col[p] = e.key.i;
      m.val[p] = e.weight;
    }
  }
  // Sort columns within each row so the product order is canonical.
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<std::pair<NodeIndex, double>> row;
    for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) row.push_back({m.col[p], m.val[p]});
    std::sort(row.begin(), row.end());
    for (std::size_t k = 0; k < row.size(); ++k) {
      m.col[m.row_ptr[r] + k] = row[k].first;
      m.val[m.row_ptr[r] + k] = row[k].second;
    }
  }
  return m;
}

CsrMatrix transpose(const CsrMatrix& m) {
  CsrMatrix t;
  t.rows = m.cols;
  t.cols = m.rows;
  std::vector<std::size_t> count(t.rows + 1, 0);
  for (auto c : m.col) ++count[c + 1];
  std::partial_sum(count.begin(), count.end(), count.begin());
  t.row_ptr = count;
  t.col.resize(m.col.size());
  t.val.resize(m.val.size());
  std::vector<std::size_t> fill(count.begin(), count.end() - 1);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) {
      std::size_t q = fill[m.col[p]]++;
      t.col[q] = static_cast<NodeIndex>(r);
      t.val[q] = m.val[p];
    }
  }
  return t;
}

namespace kernels {

namespace {

inline double row_product(const CsrMatrix& m, std::size_t r, std::span<const double> x) {
  double acc = 0.0;
  for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) acc += m.val[p] * x[m.col[p]];
  return acc;
}

constexpr double kInvSqrt2Pi = 0.3989422804014327;

inline double bernoulli_term(double log_l, std::uint8_t k, double alpha, double rho) {
  double theta = alpha * std::exp(rho * log_l);
  theta = std::clamp(theta, 0.0, 1.0);
  if (k) return theta > 0.0 ? std::log(theta) : -std::numeric_limits<double>::infinity();
  return theta < 1.0 ? std::log1p(-theta) : -std::numeric_limits<double>::infinity();
}

inline double gaussian_term(double log_l, double x, double log_beta, double gamma) {
  const double log_sigma = log_beta + gamma * log_l;
  const double z = x * std::exp(-log_sigma);
  return -0.5 * std::log(2.0 * std::numbers::pi) - log_sigma - 0.5 * z * z;
}

// Applies `term(i)` to every index and reduces block by block; block partial
// sums are combined serially so serial and parallel agree exactly.
template <class Term>
double blocked_reduce(std::size_t n, Exec exec, Term term) {
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
  auto run_block = [&](std::size_t b) {
    const std::size_t lo = b * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += term(i);
    partial[b] = acc;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace

void spmv(const CsrMatrix& m, std::span<const double> x, std::span<double> y, Exec exec) {
  if (x.size() != m.cols || y.size() != m.rows) throw DataError("spmv: dimension mismatch");
  const std::size_t n = m.rows;
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < n; ++r) y[r] = row_product(m, r, x);
  } else {
    for (std::size_t r = 0; r < n; ++r) y[r] = row_product(m, r, x);
  }
}

double blocked_sum(std::span<const double> terms, Exec exec) {
  return blocked_reduce(terms.size(), exec, [&](std::size_t i) { return terms[i]; });
}

void gaussian_kde(std::span<const double> samples, double bandwidth, std::span<const double> grid,
                  std::span<double> out, Exec exec) {
  if (out.size() != grid.size()) throw DataError("gaussian_kde: output size mismatch");
  const double norm = kInvSqrt2Pi / (bandwidth * static_cast<double>(samples.size()));
  const double inv_h = 1.0 / bandwidth;
  auto eval = [&](std::size_t g) {
    double acc = 0.0;
    for (double s : samples) {
      const double z = (grid[g] - s) * inv_h;
      acc += std::exp(-0.5 * z * z);
    }
    out[g] = acc * norm;
  };
  const std::size_t n = grid.size();
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t g = 0; g < n; ++g) eval(g);
  } else {
    for (std::size_t g = 0; g < n; ++g) eval(g);
  }
}

void gaussian_kernel_mass(std::span<const double> samples, std::span<const std::uint8_t> selected, double bandwidth,
                          std::span<const double> grid, std::span<double> total, std::span<double> chosen, Exec exec) {
  if (selected.size() != samples.size() || total.size() != grid.size() || chosen.size() != grid.size())
    throw DataError("gaussian_kernel_mass: size mismatch");
  const double inv_h = 1.0 / bandwidth;
  auto eval = [&](std::size_t g) {
    double all = 0.0;
    double sel = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double z = (grid[g] - samples[i]) * inv_h;
      const double k = std::exp(-0.5 * z * z);
      all += k;
      if (selected[i]) sel += k;
    }
    total[g] = all;
    chosen[g] = sel;
  };
  const std::size_t n = grid.size();
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t g = 0; g < n; ++g) eval(g);
  } else {
    for (std::size_t g = 0; g < n; ++g) eval(g);
  }
}

double bernoulli_loglik(std::span<const double> log_l, std::span<const std::uint8_t> changed, double alpha, double rho,
                        Exec exec) {
  if (log_l.size() != changed.size()) throw DataError("bernoulli_loglik: size mismatch");
  return blocked_reduce(log_l.size(), exec,
                        [&](std::size_t i) { return bernoulli_term(log_l[i], changed[i], alpha, rho); });
}

double gaussian_loglik(std::span<const double> log_l, std::span<const double> x, double beta, double gamma,
                       Exec exec) {
  if (log_l.size() != x.size()) throw DataError("gaussian_loglik: size mismatch");
  const double log_beta = std::log(beta);
  return blocked_reduce(log_l.size(), exec,
                        [&](std::size_t i) { return gaussian_term(log_l[i], x[i], log_beta, gamma); });
}

}  // namespace kernels
}  // namespace edgeimp
