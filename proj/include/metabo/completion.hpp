#pragma once

#include "metabo/discrete.hpp"

namespace metabo {

/// Soft-impute settings: iterative SVD with singular values shrunk by
/// `shrink` and truncated to `max_rank`, until the filled entries move by
/// less than tol (relative squared Frobenius) or max_iters is reached.
struct CompletionConfig {
  int max_rank = 1;
  double shrink = 0.0;
  int max_iters = 200;
  double tol = 1e-9;

  void validate() const;
};

struct CompletionStats {
  int iterations = 0;
  /// Masked squared error plus nuclear-norm surrogate, one entry per
  /// iteration; nonincreasing.
  std::vector<double> objective;
};

/// Fills the masked entries of `data` by soft-impute; observed entries are
/// returned unchanged and the output mask is all-true. Every row and column
/// must contain at least one observed entry.
OfflineMatrix complete_matrix(const OfflineMatrix& data, const CompletionConfig& cfg,
                              CompletionStats* stats = nullptr);

}  // namespace metabo
