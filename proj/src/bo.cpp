#include "metabo/bo.hpp"

#include <algorithm>
#include <stdexcept>

namespace metabo {

void DiscreteEstimatorModel::posterior(const History& history, Vector& mean, Vector& var) const {
  const PosteriorEstimate post = estimate_posterior_discrete(prior_, history);
  mean = post.mean_hat_t;
  var = post.var_hat_t;
}

void ContinuousEstimatorModel::posterior(const History& history, Vector& mean,
                                         Vector& var) const {
  const int t = history.size();
  const int k = prior_.features.n_features();
  Matrix phi_t(k, t);
  for (int i = 0; i < t; ++i) phi_t.col(i) = cand_features_.col(history.indices.at(i));
  Eigen::Map<const Vector> ys(history.observations.data(), t);
  const ContinuousPosterior post = estimate_posterior_continuous(prior_, phi_t, Vector(ys));

  mean = cand_features_.transpose() * post.u_hat_t;
  const Matrix tmp = post.sigma_hat_t * cand_features_;  // K x M
  var = (cand_features_.cwiseProduct(tmp)).colwise().sum().transpose();
}

void ExactGpModel::posterior(const History& history, Vector& mean, Vector& var) const {
  const ExactPosterior post = exact_posterior(prior_, history);
  mean = post.mean_t;
  var = post.cov_t.diagonal();
}

BoResult run_bo(const PosteriorModel& model, const Objective& objective, int t_steps,
                const AcquisitionConfig& acq, std::uint64_t seed, const Vector* true_f) {
  acq.validate();
  if (t_steps < 0) throw std::invalid_argument("run_bo: negative horizon");
  Rng rng(derive_seed(seed, "bo-observe"));

  BoResult out;
  History& h = out.history;
  try {
    for (int t = 1; t <= t_steps; ++t) {
      Vector mean, var;
      model.posterior(h, mean, var);
      var = var.cwiseMax(0.0);

      double zf;
      if (acq.kind == AcquisitionKind::Ucb) {
        zf = acq.fixed_zeta ? *acq.fixed_zeta : ucb_zeta(acq.n_train, t, acq.delta);
      } else {
        zf = *acq.f_star_hat;
      }

      Vector scores(mean.size());
      for (int i = 0; i < mean.size(); ++i) scores[i] = score(acq.kind, mean[i], var[i], zf);
      const int x = select_next(scores, h.indices);

      const double y = objective(x, rng);
      h.indices.push_back(x);
      h.observations.push_back(y);
      if (true_f) h.true_values.push_back((*true_f)[x]);
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

double best_sample_simple_regret(const Vector& true_f, const History& history) {
  if (history.size() == 0) throw std::runtime_error("empty history");
  double best = -std::numeric_limits<double>::infinity();
  for (int q : history.indices) best = std::max(best, true_f[q]);
  return true_f.maxCoeff() - best;
}

int infer_argmax(const History& history) {
  if (history.size() == 0) throw std::runtime_error("empty history");
  int tau = 0;
  for (int i = 1; i < history.size(); ++i)
    if (history.observations[i] > history.observations[tau]) tau = i;
  return tau;
}

double simple_regret(const Vector& true_f, const History& history) {
  const int tau = infer_argmax(history);
  return true_f.maxCoeff() - true_f[history.indices.at(tau)];
}

RegretRecord regret_record(const Vector& true_f, const History& history) {
  RegretRecord rec;
  const double fmax = true_f.maxCoeff();
  double best_f = -std::numeric_limits<double>::infinity();
  double best_y = -std::numeric_limits<double>::infinity();
  int tau = -1;
  for (int i = 0; i < history.size(); ++i) {
    const int q = history.indices[i];
    best_f = std::max(best_f, true_f[q]);
    if (history.observations[i] > best_y) {
      best_y = history.observations[i];
      tau = i;
    }
    RegretStep step;
    step.t = i + 1;
    step.r_t = fmax - best_f;
    step.big_r_t = fmax - true_f[history.indices[tau]];
    step.y_t = history.observations[i];
    step.f_t = true_f[q];
    rec.per_t.push_back(step);
  }
  rec.inferred_argmax = tau >= 0 ? history.indices[tau] : -1;
  return rec;
}

}  // namespace metabo
