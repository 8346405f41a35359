#pragma once

#include <cstdint>
#include <vector>

#include "metabo/linalg.hpp"

namespace metabo {

/// Ground-truth Gaussian process over a finite candidate set: mean vector,
/// covariance matrix and observation noise standard deviation.
struct GpPrior {
  Vector mean;
  Matrix cov;
  double noise_sd = 0.0;

  int size() const { return static_cast<int>(mean.size()); }

  /// Checks symmetry, PSD within 1e-8*trace/m and noise_sd >= 0.
  void validate() const;
};

/// Exact posterior over the candidate set after conditioning on a History.
struct ExactPosterior {
  Vector mean_t;
  Matrix cov_t;
};

/// Online record D_t: queried candidate indices (always present; candidate
/// sets are finite grids), optional input coordinates for continuous runs,
/// noisy observations and, when known, the true f values for scoring.
struct History {
  std::vector<int> indices;
  Matrix points;  // t x d when used, 0 x 0 otherwise
  std::vector<double> observations;
  std::vector<double> true_values;

  int size() const { return static_cast<int>(observations.size()); }
  void validate() const;
};

/// One draw of f over the candidate set from N(mean, cov). Deterministic
/// given the seed; a zero covariance returns the mean exactly.
Vector sample_function(const GpPrior& prior, std::uint64_t seed);

/// Exact GP posterior: mean_t(x) = mu(x) + k(x,X_t)(k(X_t)+s^2 I)^-1 (y - mu(X_t))
/// and the matching Schur-complement covariance. An empty history returns the
/// prior unchanged.
ExactPosterior exact_posterior(const GpPrior& prior, const History& history);

}  // namespace metabo
