#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP variant selected by `Exec`; both produce bit-identical results (sums
// use a fixed block decomposition so the reduction order never depends on the
// thread count).

#include <cstdint>
#include <span>
#include <vector>

#include "edgeimp/graph.hpp"

namespace edgeimp {

enum class Exec { serial, parallel };

/// Compressed sparse row matrix.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<NodeIndex> col;
  std::vector<double> val;
};

/// Adjacency matrix A of a snapshot; undirected edges fill both (i,j) and (j,i).
CsrMatrix adjacency_matrix(const Snapshot& s);
CsrMatrix transpose(const CsrMatrix& m);

namespace kernels {

/// Block length for deterministic reductions.
inline constexpr std::size_t kReductionBlock = 4096;

/// y = M x
void spmv(const CsrMatrix& m, std::span<const double> x, std::span<double> y, Exec exec);

/// Sum of terms using the fixed block decomposition.
double blocked_sum(std::span<const double> terms, Exec exec);

/// out[g] = (1/(n h)) sum_i phi((grid[g] - samples[i]) / h)
void gaussian_kde(std::span<const double> samples, double bandwidth, std::span<const double> grid,
                  std::span<double> out, Exec exec);

/// Nadaraya-Watson style class sums: for every grid point, the kernel mass of
/// all samples and of the samples flagged in `selected`.
void gaussian_kernel_mass(std::span<const double> samples, std::span<const std::uint8_t> selected, double bandwidth,
                          std::span<const double> grid, std::span<double> total, std::span<double> chosen, Exec exec);

/// Bernoulli log-likelihood sum over records with theta = clamp(alpha * exp(rho * log_l), 0, 1).
/// Returns -inf when an observed outcome has probability zero.
double bernoulli_loglik(std::span<const double> log_l, std::span<const std::uint8_t> changed, double alpha, double rho,
                        Exec exec);

/// Gaussian log-likelihood with sigma_e = beta * exp(gamma * log_l).
double gaussian_loglik(std::span<const double> log_l, std::span<const double> x, double beta, double gamma,
                       Exec exec);

}  // namespace kernels
}  // namespace edgeimp
