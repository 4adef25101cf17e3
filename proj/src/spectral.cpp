#include "edgeimp/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "edgeimp/error.hpp"

namespace edgeimp {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void fix_sign(std::vector<double>& v) {
  auto it = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (it != v.end() && *it < 0.0)
    for (auto& x : v) x = -x;
}

struct RitzResult {
  double lambda;
  std::vector<double> vector;
  double residual;
};

// Rayleigh quotient and infinity-norm residual of a unit vector.
RitzResult refine(const SymmetricOperator& op, std::vector<double> x, std::vector<double>& work, int& matvecs) {
  op(x, work);
  ++matvecs;
  const double lambda = dot(x, work);
  double res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) res = std::max(res, std::abs(work[i] - lambda * x[i]));
  return {lambda, std::move(x), res};
}

}  // namespace

EigenPair leading_eigenpair(const SymmetricOperator& op, std::size_t n, const SolverOptions& opts) {
  if (n == 0) throw DataError("leading eigenpair of an empty graph");
  const std::size_t m_max = std::max<std::size_t>(1, std::min<std::size_t>(n, opts.krylov_dim));

  std::vector<double> start(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<std::vector<double>> basis;
  std::vector<double> w(n), work(n);
  std::vector<double> alpha, beta;
  int matvecs = 0;
  double best_residual = std::numeric_limits<double>::infinity();

  while (true) {
    basis.assign(1, start);
    alpha.clear();
    beta.clear();
    for (std::size_t k = 0; k < m_max; ++k) {
      op(basis[k], w);
      ++matvecs;
      const double a = dot(basis[k], w);
      alpha.push_back(a);
      // Two passes of classical Gram-Schmidt against the whole basis.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : basis) {
          const double c = dot(q, w);
          for (std::size_t i = 0; i < n; ++i) w[i] -= c * q[i];
        }
      }
      const double b = norm2(w);
      const double scale = std::max(1.0, std::abs(a));
      if (k + 1 == m_max || b <= 1e-13 * scale) break;
      beta.push_back(b);
      std::vector<double> next(n);
      for (std::size_t i = 0; i < n; ++i) next[i] = w[i] / b;
      basis.push_back(std::move(next));
    }

    const std::size_t m = alpha.size();
    Eigen::VectorXd diag(static_cast<Eigen::Index>(m));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(m > 0 ? m - 1 : 0));
    for (std::size_t k = 0; k < m; ++k) diag[static_cast<Eigen::Index>(k)] = alpha[k];
    for (std::size_t k = 0; k + 1 < m; ++k) sub[static_cast<Eigen::Index>(k)] = beta[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const auto y = tri.eigenvectors().col(static_cast<Eigen::Index>(m - 1));

    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      const double c = y[static_cast<Eigen::Index>(k)];
      for (std::size_t i = 0; i < n; ++i) x[i] += c * basis[k][i];
    }
    const double nx = norm2(x);
    for (auto& v : x) v /= nx;

    auto ritz = refine(op, std::move(x), work, matvecs);
    if (!std::isfinite(ritz.lambda) || !std::isfinite(ritz.residual) ||
        !std::all_of(ritz.vector.begin(), ritz.vector.end(), [](double v) { return std::isfinite(v); }))
      throw NumericalError("leading eigenpair is not finite (matrix entries too large)");
    best_residual = std::min(best_residual, ritz.residual);
    if (ritz.residual <= opts.tol * std::max(1.0, std::abs(ritz.lambda))) {
      fix_sign(ritz.vector);
      return {ritz.lambda, std::move(ritz.vector), ritz.residual, matvecs};
    }
    if (matvecs >= opts.max_iter)
      throw NumericalError("leading eigenpair did not converge after " + std::to_string(matvecs) +
                           " operator applications (best residual " + std::to_string(best_residual) + ")");
    start = std::move(ritz.vector);
  }
}

EigenPair leading_eigenpair(const Snapshot& s, const SolverOptions& opts) {
  if (s.directed()) throw DataError("leading_eigenpair requires an undirected snapshot");
  if (s.empty()) throw DataError("leading eigenpair of an empty graph");
  const CsrMatrix a = adjacency_matrix(s);
  const Exec exec = opts.exec;
  return leading_eigenpair([&](std::span<const double> x, std::span<double> y) { kernels::spmv(a, x, y, exec); },
                           s.num_nodes(), opts);
}

SingularTriple leading_singular(const Snapshot& s, const SolverOptions& opts) {
  if (s.empty()) throw DataError("leading singular value of an empty graph");
  const CsrMatrix a = adjacency_matrix(s);
  const CsrMatrix at = transpose(a);
  const Exec exec = opts.exec;
  std::vector<double> tmp(s.num_nodes());
  auto op = [&](std::span<const double> x, std::span<double> y) {
    kernels::spmv(at, x, tmp, exec);
    kernels::spmv(a, tmp, y, exec);
  };
  auto ep = leading_eigenpair(op, s.num_nodes(), opts);
  SingularTriple out;
  out.m_lambda = ep.lambda;
  out.value = std::sqrt(std::max(0.0, ep.lambda));
  out.m_vector = std::move(ep.vector);
  out.residual = ep.residual;
  out.matvecs = ep.matvecs;
  return out;
}

}  // namespace edgeimp
