#include "metabo/discrete.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace metabo {

void OfflineMatrix::validate() const {
  if (n_tasks() < 2) throw std::invalid_argument("insufficient tasks");
  if (n_inputs() < 1) throw std::invalid_argument("offline matrix has no inputs");
  if (mask.size() != 0 && (mask.rows() != values.rows() || mask.cols() != values.cols()))
    throw std::invalid_argument("offline matrix mask size mismatch");
}

DiscretePriorEstimate estimate_prior_discrete(const OfflineMatrix& data) {
  data.validate();
  if (!data.complete())
    throw std::invalid_argument("offline matrix has masked entries; run completion first");

  const int n = data.n_tasks();
  DiscretePriorEstimate est;
  est.n_train = n;
  est.mean_hat = data.values.colwise().mean();
  const Matrix centered = data.values.rowwise() - est.mean_hat.transpose();
  est.cov_hat = symmetrize(centered.transpose() * centered / static_cast<double>(n - 1));
  return est;
}

PosteriorEstimate estimate_posterior_discrete(const DiscretePriorEstimate& prior,
                                              const History& history, bool want_full_cov) {
  history.validate();
  const int m = static_cast<int>(prior.mean_hat.size());
  const int n = prior.n_train;
  const int t = history.size();

  PosteriorEstimate post;
  post.t = t;
  if (t == 0) {
    post.mean_hat_t = prior.mean_hat;
    post.var_hat_t = prior.cov_hat.diagonal();
    if (want_full_cov) post.cov_hat_t = prior.cov_hat;
    return post;
  }
  if (t > n - 2) throw std::runtime_error("training set too small");

  std::set<int> seen;
  for (int q : history.indices) {
    if (q < 0 || q >= m) throw std::invalid_argument("history index outside candidate set");
    if (!seen.insert(q).second) throw std::invalid_argument("duplicate query index");
  }

  Matrix kqq(t, t);
  Matrix kxq(m, t);
  Vector resid(t);
  for (int i = 0; i < t; ++i) {
    const int qi = history.indices[i];
    for (int j = 0; j < t; ++j) kqq(i, j) = prior.cov_hat(qi, history.indices[j]);
    kxq.col(i) = prior.cov_hat.col(qi);
    resid[i] = history.observations[i] - prior.mean_hat[qi];
  }

  const SpdFactor factor(kqq);
  post.mean_hat_t = prior.mean_hat + kxq * factor.solve(resid);

  const double scale = static_cast<double>(n - 1) / static_cast<double>(n - t - 1);
  const Matrix b = factor.solve(Matrix(kxq.transpose()));  // t x m
  post.var_hat_t.resize(m);
  for (int i = 0; i < m; ++i)
    post.var_hat_t[i] = scale * (prior.cov_hat(i, i) - kxq.row(i).dot(b.col(i)));
  if (want_full_cov) post.cov_hat_t = symmetrize(scale * (prior.cov_hat - kxq * b));
  return post;
}

ConcentrationConstants concentration_constants(int n, int t, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta outside (0,1)");
  if (t < 0) throw std::invalid_argument("negative t");
  if (n <= t + 3) throw std::runtime_error("training set too small");

  const double l4 = std::log(4.0 / delta);
  ConcentrationConstants c;
  c.a_t = 4.0 * (n - 2.0 + t + 2.0 * std::sqrt(t * l4) + 2.0 * l4) /
          (delta * n * (n - t - 2.0));
  c.b_t = l4 / (n - t - 1.0);
  return c;
}

}  // namespace metabo
