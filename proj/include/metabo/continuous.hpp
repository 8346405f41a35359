#pragma once

#include <cstdint>

#include "metabo/gp.hpp"
#include "metabo/linalg.hpp"

namespace metabo {

/// Random cosine feature map Phi(x) = scale * cos(frequencies x + phases),
/// a K-vector per d-dimensional input.
struct FeatureMap {
  Matrix frequencies;  // K x d
  Vector phases;       // K
  double scale = 1.0;

  int n_features() const { return static_cast<int>(frequencies.rows()); }
  int input_dim() const { return static_cast<int>(frequencies.cols()); }

  /// Phi(x) for a single input.
  Vector operator()(const Eigen::Ref<const Vector>& x) const;
  /// Feature matrix K x n for inputs given as rows of X (n x d).
  Matrix features(const Eigen::Ref<const Matrix>& x) const;
};

/// Frequencies ~ N(0, bandwidth^-2 I), phases uniform on [0, 2pi),
/// scale = sqrt(2/K); with these choices Phi(x)'Phi(x') approximates the
/// squared-exponential kernel with the given bandwidth as K grows.
FeatureMap make_cosine_features(int d, int k, double bandwidth, std::uint64_t seed);

/// Least squares weight estimate for one task via the normal equations
/// W_hat = (Phi Phi')^-1 Phi y. Requires M >= K and a full-row-rank design.
Vector fit_task_weights(const Matrix& design, const Vector& ys);

/// Batched variant: rows of `ys_tasks` (N x M) are tasks, returns N x K.
Matrix fit_task_weights_all(const Matrix& design, const Matrix& ys_tasks);

/// Primal-form prior estimate: sample mean/covariance of the per-task weight
/// vectors, plus the cached design Gram inverse used by bar_sigma_sq.
struct ContinuousPriorEstimate {
  FeatureMap features;
  Vector u_hat;
  Matrix sigma_hat;
  int n_train = 0;
  Matrix design_gram_inverse;
};

struct ContinuousPosterior {
  FeatureMap features;
  Vector u_hat_t;
  Matrix sigma_hat_t;
  int t = 0;
};

ContinuousPriorEstimate estimate_prior_continuous(const Matrix& weights,
                                                  const Matrix& design,
                                                  FeatureMap features);

/// Weight-space posterior estimators:
///   u_hat_t     = u_hat + S Phi_t (Phi_t' S Phi_t)^-1 (y - Phi_t' u_hat)
///   sigma_hat_t = (N-1)/(N-t-1) (S - S Phi_t (Phi_t' S Phi_t)^-1 Phi_t' S)
/// with S = sigma_hat; requires t < K and t <= N-2.
ContinuousPosterior estimate_posterior_continuous(const ContinuousPriorEstimate& prior,
                                                  const Matrix& phi_t, const Vector& ys);

/// Convenience overload reading Phi(x_t) from history.points.
ContinuousPosterior estimate_posterior_continuous(const ContinuousPriorEstimate& prior,
                                                  const History& history);

struct Prediction {
  double mean_hat = 0.0;
  double var_hat = 0.0;  // clipped at 0
  double var_raw = 0.0;  // pre-clip value, kept for diagnostics
};

Prediction predict(const FeatureMap& features, const Vector& u, const Matrix& sigma,
                   const Eigen::Ref<const Vector>& x);
Prediction predict(const ContinuousPriorEstimate& prior, const Eigen::Ref<const Vector>& x);
Prediction predict(const ContinuousPosterior& post, const Eigen::Ref<const Vector>& x);

/// Design-dependent effective noise sigma^2 Phi(x)' (Phi(xbar) Phi(xbar)')^-1 Phi(x).
double bar_sigma_sq(const ContinuousPriorEstimate& prior, double noise_sd,
                    const Eigen::Ref<const Vector>& x);

/// Exact weight-space posterior for a known (u, Sigma) and iid noise:
///   C = Phi_t' Sigma Phi_t + noise_sd^2 I. Reference path for validation.
void exact_weight_posterior(const Vector& u, const Matrix& sigma, const Matrix& phi_t,
                            const Vector& ys, double noise_sd, Vector& u_t, Matrix& sigma_t);

}  // namespace metabo
