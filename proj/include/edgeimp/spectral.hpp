#pragma once

#include <functional>
#include <span>
#include <vector>

#include "edgeimp/graph.hpp"
#include "edgeimp/kernels.hpp"

namespace edgeimp {

/// Leading eigenvalue and unit eigenvector of a symmetric adjacency matrix.
/// The sign is fixed so the largest-magnitude entry is positive.
struct EigenPair {
  double lambda = 0.0;
  std::vector<double> vector;
  double residual = 0.0;  ///< |A v - lambda v|_inf at exit
  int matvecs = 0;
};

/// Leading singular value s of A and the leading eigenvector of M = A A^T.
struct SingularTriple {
  double value = 0.0;
  std::vector<double> m_vector;
  double m_lambda = 0.0;  ///< s^2, leading eigenvalue of M
  double residual = 0.0;
  int matvecs = 0;
};

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 10'000;  ///< budget of operator applications
  int krylov_dim = 64;    ///< Lanczos basis size before a restart
  Exec exec = Exec::parallel;
};

/// y = Op x for a symmetric operator of dimension n.
using SymmetricOperator = std::function<void(std::span<const double>, std::span<double>)>;

/// Largest algebraic eigenpair of a symmetric operator by restarted Lanczos
/// with full reorthogonalisation, started from the normalised all-ones vector.
/// Converged when |Op v - lambda v|_inf <= tol * max(1, |lambda|); otherwise
/// throws NumericalError carrying the final residual.
EigenPair leading_eigenpair(const SymmetricOperator& op, std::size_t n, const SolverOptions& opts = {});

/// Leading eigenpair of an undirected snapshot's adjacency matrix.
EigenPair leading_eigenpair(const Snapshot& s, const SolverOptions& opts = {});

/// Leading singular value of a directed snapshot via the matrix-free product
/// x -> A (A^T x).
SingularTriple leading_singular(const Snapshot& s, const SolverOptions& opts = {});

}  // namespace edgeimp
