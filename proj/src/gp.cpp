#include "metabo/gp.hpp"

#include <stdexcept>

#include "metabo/rng.hpp"

namespace metabo {

void GpPrior::validate() const {
  if (cov.rows() != mean.size() || cov.cols() != mean.size())
    throw std::invalid_argument("prior: covariance size does not match mean");
  if (!is_symmetric(cov)) throw std::invalid_argument("prior: covariance not symmetric");
  if (noise_sd < 0.0) throw std::invalid_argument("prior: negative noise_sd");
  if (size() > 0 && min_eigenvalue(cov) < -psd_tolerance(cov) - 1e-12)
    throw std::runtime_error("indefinite covariance");
}

void History::validate() const {
  const std::size_t t = observations.size();
  if (!indices.empty() && indices.size() != t)
    throw std::invalid_argument("history: queries and observations differ in length");
  if (points.rows() != 0 && static_cast<std::size_t>(points.rows()) != t)
    throw std::invalid_argument("history: points and observations differ in length");
  if (!true_values.empty() && true_values.size() != t)
    throw std::invalid_argument("history: true_values and observations differ in length");
}

Vector sample_function(const GpPrior& prior, std::uint64_t seed) {
  const int m = prior.size();
  if (prior.cov.rows() != m || prior.cov.cols() != m)
    throw std::invalid_argument("prior: covariance size does not match mean");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(prior.cov));
  if (es.info() != Eigen::Success) throw std::runtime_error("indefinite covariance");
  const double tol = psd_tolerance(prior.cov) + 1e-12;
  if (m > 0 && es.eigenvalues().minCoeff() < -tol)
    throw std::runtime_error("indefinite covariance");

  Rng rng(seed);
  Vector z(m);
  for (int i = 0; i < m; ++i) z[i] = rng.normal();
  const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return prior.mean + es.eigenvectors() * root.asDiagonal() * z;
}

ExactPosterior exact_posterior(const GpPrior& prior, const History& history) {
  history.validate();
  const int m = prior.size();
  const int t = history.size();
  if (t == 0) return {prior.mean, prior.cov};

  Matrix kqq(t, t);
  Matrix kxq(m, t);
  Vector resid(t);
  for (int i = 0; i < t; ++i) {
    const int qi = history.indices.at(i);
    if (qi < 0 || qi >= m) throw std::invalid_argument("history index outside candidate set");
    for (int j = 0; j < t; ++j) kqq(i, j) = prior.cov(qi, history.indices[j]);
    kxq.col(i) = prior.cov.col(qi);
    resid[i] = history.observations[i] - prior.mean[qi];
  }
  kqq.diagonal().array() += prior.noise_sd * prior.noise_sd;

  const SpdFactor factor(kqq);
  ExactPosterior post;
  post.mean_t = prior.mean + kxq * factor.solve(resid);
  post.cov_t = symmetrize(prior.cov - kxq * factor.solve(Matrix(kxq.transpose())));
  return post;
}

}  // namespace metabo
