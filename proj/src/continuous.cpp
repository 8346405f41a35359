#include "metabo/continuous.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "metabo/rng.hpp"

namespace metabo {

Vector FeatureMap::operator()(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != input_dim()) throw std::invalid_argument("feature map: input dimension mismatch");
  return scale * (frequencies * x + phases).array().cos();
}

Matrix FeatureMap::features(const Eigen::Ref<const Matrix>& x) const {
  if (x.cols() != input_dim()) throw std::invalid_argument("feature map: input dimension mismatch");
  Matrix a = frequencies * x.transpose();  // K x n
  a.colwise() += phases;
  return scale * a.array().cos();
}

FeatureMap make_cosine_features(int d, int k, double bandwidth, std::uint64_t seed) {
  if (d < 1 || k < 1) throw std::invalid_argument("make_cosine_features: d and K must be >= 1");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("make_cosine_features: bandwidth <= 0");
  Rng rng(seed);
  FeatureMap map;
  map.frequencies.resize(k, d);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < d; ++j) map.frequencies(i, j) = rng.normal() / bandwidth;
  map.phases.resize(k);
  for (int i = 0; i < k; ++i) map.phases[i] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  map.scale = std::sqrt(2.0 / static_cast<double>(k));
  return map;
}

namespace {

void require_full_row_rank(const Matrix& design) {
  const int k = static_cast<int>(design.rows());
  if (design.cols() < k) throw std::invalid_argument("design not full row rank");
  Eigen::ColPivHouseholderQR<Matrix> qr(design.transpose());
  if (qr.rank() < k) throw std::invalid_argument("design not full row rank");
}

}  // namespace

Vector fit_task_weights(const Matrix& design, const Vector& ys) {
  if (ys.size() != design.cols())
    throw std::invalid_argument("fit_task_weights: observation count does not match design");
  require_full_row_rank(design);
  const SpdFactor gram(Matrix(design * design.transpose()));
  return gram.solve(Vector(design * ys));
}

Matrix fit_task_weights_all(const Matrix& design, const Matrix& ys_tasks) {
  if (ys_tasks.cols() != design.cols())
    throw std::invalid_argument("fit_task_weights: observation count does not match design");
  require_full_row_rank(design);
  const SpdFactor gram(Matrix(design * design.transpose()));
  return gram.solve(Matrix(design * ys_tasks.transpose())).transpose();
}

ContinuousPriorEstimate estimate_prior_continuous(const Matrix& weights, const Matrix& design,
                                                  FeatureMap features) {
  const int n = static_cast<int>(weights.rows());
  if (n < 2) throw std::invalid_argument("insufficient tasks");
  if (weights.cols() != features.n_features() || design.rows() != features.n_features())
    throw std::invalid_argument("estimate_prior_continuous: feature dimension mismatch");

  ContinuousPriorEstimate est;
  est.features = std::move(features);
  est.n_train = n;
  est.u_hat = weights.colwise().mean();
  const Matrix centered = weights.rowwise() - est.u_hat.transpose();
  est.sigma_hat = symmetrize(centered.transpose() * centered / static_cast<double>(n - 1));
  const int k = static_cast<int>(design.rows());
  est.design_gram_inverse =
      symmetrize(SpdFactor(Matrix(design * design.transpose())).solve(Matrix(Matrix::Identity(k, k))));
  return est;
}

ContinuousPosterior estimate_posterior_continuous(const ContinuousPriorEstimate& prior,
                                                  const Matrix& phi_t, const Vector& ys) {
  const int k = static_cast<int>(prior.u_hat.size());
  const int t = static_cast<int>(ys.size());
  if (phi_t.rows() != k || phi_t.cols() != t)
    throw std::invalid_argument("estimate_posterior_continuous: Phi(x_t) shape mismatch");

  ContinuousPosterior post;
  post.features = prior.features;
  post.t = t;
  if (t == 0) {
    post.u_hat_t = prior.u_hat;
    post.sigma_hat_t = prior.sigma_hat;
    return post;
  }
  if (t > k) throw std::runtime_error("history exceeds feature dimension");
  if (t > prior.n_train - 2) throw std::runtime_error("training set too small");

  const Matrix sp = prior.sigma_hat * phi_t;                   // K x t
  const SpdFactor inner(Matrix(phi_t.transpose() * sp));       // t x t
  const Vector resid = ys - phi_t.transpose() * prior.u_hat;
  const double scale =
      static_cast<double>(prior.n_train - 1) / static_cast<double>(prior.n_train - t - 1);

  post.u_hat_t = prior.u_hat + sp * inner.solve(resid);
  // Symmetrize after the Schur update to suppress roundoff asymmetry.
  post.sigma_hat_t =
      symmetrize(scale * (prior.sigma_hat - sp * inner.solve(Matrix(sp.transpose()))));
  return post;
}

ContinuousPosterior estimate_posterior_continuous(const ContinuousPriorEstimate& prior,
                                                  const History& history) {
  history.validate();
  if (history.size() > 0 && history.points.rows() != history.size())
    throw std::invalid_argument("estimate_posterior_continuous: history has no input points");
  const Matrix phi_t = history.size() == 0
                           ? Matrix(prior.features.n_features(), 0)
                           : prior.features.features(history.points);
  Eigen::Map<const Vector> ys(history.observations.data(),
                              static_cast<Eigen::Index>(history.observations.size()));
  return estimate_posterior_continuous(prior, phi_t, Vector(ys));
}

Prediction predict(const FeatureMap& features, const Vector& u, const Matrix& sigma,
                   const Eigen::Ref<const Vector>& x) {
  const Vector phi = features(x);
  Prediction p;
  p.mean_hat = phi.dot(u);
  p.var_raw = phi.dot(sigma * phi);
  p.var_hat = std::max(p.var_raw, 0.0);
  return p;
}

Prediction predict(const ContinuousPriorEstimate& prior, const Eigen::Ref<const Vector>& x) {
  return predict(prior.features, prior.u_hat, prior.sigma_hat, x);
}

Prediction predict(const ContinuousPosterior& post, const Eigen::Ref<const Vector>& x) {
  return predict(post.features, post.u_hat_t, post.sigma_hat_t, x);
}

double bar_sigma_sq(const ContinuousPriorEstimate& prior, double noise_sd,
                    const Eigen::Ref<const Vector>& x) {
  if (prior.design_gram_inverse.rows() != prior.features.n_features())
    throw std::logic_error("bar_sigma_sq: design gram inverse not cached");
  const Vector phi = prior.features(x);
  return std::max(noise_sd * noise_sd * phi.dot(prior.design_gram_inverse * phi), 0.0);
}

void exact_weight_posterior(const Vector& u, const Matrix& sigma, const Matrix& phi_t,
                            const Vector& ys, double noise_sd, Vector& u_t, Matrix& sigma_t) {
  const int t = static_cast<int>(ys.size());
  if (t == 0) {
    u_t = u;
    sigma_t = sigma;
    return;
  }
  Matrix c = phi_t.transpose() * sigma * phi_t;
  c.diagonal().array() += noise_sd * noise_sd;
  const SpdFactor factor(c);
  const Matrix sp = sigma * phi_t;
  u_t = u + sp * factor.solve(Vector(ys - phi_t.transpose() * u));
  sigma_t = symmetrize(sigma - sp * factor.solve(Matrix(sp.transpose())));
}

}  // namespace metabo
