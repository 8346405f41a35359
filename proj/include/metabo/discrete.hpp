#pragma once

#include <optional>

#include "metabo/gp.hpp"
#include "metabo/linalg.hpp"

namespace metabo {

/// N x M offline observation table with a presence mask. Masked-out entries
/// are ignored by every consumer; run complete_matrix before estimating a
/// prior from a partially observed table.
struct OfflineMatrix {
  Matrix values;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask;
  std::optional<double> noise_sd_hint;

  int n_tasks() const { return static_cast<int>(values.rows()); }
  int n_inputs() const { return static_cast<int>(values.cols()); }
  bool complete() const { return mask.size() == 0 || mask.all(); }
  void validate() const;
};

/// Sample mean/covariance prior estimate over the finite candidate set.
/// cov_hat uses the (N-1) denominator, so its rank is at most N-1 and the
/// observation noise is folded into it.
struct DiscretePriorEstimate {
  Vector mean_hat;
  Matrix cov_hat;
  int n_train = 0;
};

/// Estimated posterior: mean and per-candidate variance (optionally the full
/// covariance). At queried indices the estimate interpolates: variance 0 and
/// mean equal to the observation.
struct PosteriorEstimate {
  Vector mean_hat_t;
  Vector var_hat_t;
  std::optional<Matrix> cov_hat_t;
  int t = 0;
};

DiscretePriorEstimate estimate_prior_discrete(const OfflineMatrix& data);

/// Posterior estimators over the candidate set:
///   mean_hat_t(x) = mean_hat(x) + k_hat(x,X_t) k_hat(X_t)^-1 (y - mean_hat(X_t))
///   cov_hat_t     = (N-1)/(N-t-1) * Schur complement of k_hat at X_t.
/// Queried indices must be distinct; requires t <= N-2.
PosteriorEstimate estimate_posterior_discrete(const DiscretePriorEstimate& prior,
                                              const History& history,
                                              bool want_full_cov = false);

struct ConcentrationConstants {
  double a_t = 0.0;
  double b_t = 0.0;
};

/// Concentration constants for the estimated posterior at step t:
///   a_t = 4(N-2+t+2 sqrt(t log(4/d))+2 log(4/d)) / (d N (N-t-2))
///   b_t = log(4/d) / (N-t-1).
ConcentrationConstants concentration_constants(int n, int t, double delta);

}  // namespace metabo
