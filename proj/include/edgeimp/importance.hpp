#pragma once

#include <optional>
#include <span>
#include <vector>

#include "edgeimp/graph.hpp"
#include "edgeimp/spectral.hpp"

namespace edgeimp {

/// l_e values below this are floored before taking logarithms.
inline constexpr double kImportanceFloor = 1e-300;

struct EdgeImportance {
  EdgeKey key;
  double value = 0.0;
  bool floored = false;  ///< value underflowed and was raised to kImportanceFloor

  double log_value() const;
};

/// Structural importance l_e = 2 v_i v_j per edge of one snapshot, sorted by key.
struct ImportanceMap {
  std::int64_t timestamp = 0;
  std::vector<EdgeImportance> entries;

  const EdgeImportance* find(EdgeKey key) const;
  std::size_t floored_count() const;
};

struct ImportanceOptions {
  /// Evaluate every node pair i < j, not just present edges.
  bool all_pairs = false;
};

/// l_e for each non-loop edge of `s` (or each node pair). Throws DataError if
/// the eigenvector does not match the snapshot or the snapshot is directed.
ImportanceMap edge_importance(const EigenPair& ep, const Snapshot& s, const ImportanceOptions& opts = {});

/// 2 v_i v_j for an arbitrary pair.
double pair_importance(const EigenPair& ep, NodeIndex i, NodeIndex j);

/// d s^A / d M_ij = v_i v_j / (2 s^A) for one entry of M = A A^T.
struct DirectedImportance {
  EdgeKey key;  ///< M-entry (i <= j; M is symmetric)
  double value = 0.0;
};

/// Derivatives over the nonzero pattern of M. Throws DataError if s^A = 0.
std::vector<DirectedImportance> edge_importance_directed(const SingularTriple& st, const Snapshot& s);

struct EdgeChange {
  EdgeKey key;
  double delta = 0.0;  ///< absolute weight change
};

struct DeltaLambdaEstimate {
  double predicted = 0.0;
  std::optional<double> actual;
  std::vector<double> contributions;  ///< l_e * delta per change, input order
};

/// predicted = sum l_e * delta. Throws DataError for keys absent from `imp`.
DeltaLambdaEstimate delta_lambda_approx(const ImportanceMap& imp, std::span<const EdgeChange> changes);

/// As above, plus the exact change lambda(next) - base_lambda.
DeltaLambdaEstimate delta_lambda_approx(const ImportanceMap& imp, std::span<const EdgeChange> changes,
                                        double base_lambda, const Snapshot& next, const SolverOptions& opts = {});

/// Central difference (lambda(A + h E_e) - lambda(A - h E_e)) / 2h where E_e
/// touches both (i,j) and (j,i). Throws DataError when A - h E_e would have a
/// non-positive weight.
double finite_difference_le(const Snapshot& s, EdgeKey e, double h, const SolverOptions& opts = {});

}  // namespace edgeimp
