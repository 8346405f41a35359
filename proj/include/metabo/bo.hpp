#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "metabo/acquisition.hpp"
#include "metabo/continuous.hpp"
#include "metabo/discrete.hpp"
#include "metabo/gp.hpp"
#include "metabo/rng.hpp"

namespace metabo {

/// Posterior over the finite candidate set, conditioned on the history so
/// far. Implementations are immutable; the loop recomputes from scratch each
/// step, which keeps the code equal to the estimator equations at desk scale.
class PosteriorModel {
 public:
  virtual ~PosteriorModel() = default;
  virtual int n_candidates() const = 0;
  virtual int n_train() const = 0;
  virtual void posterior(const History& history, Vector& mean, Vector& var) const = 0;
};

/// Estimated discrete prior with the Schur-complement posterior estimators.
class DiscreteEstimatorModel final : public PosteriorModel {
 public:
  explicit DiscreteEstimatorModel(DiscretePriorEstimate prior) : prior_(std::move(prior)) {}
  int n_candidates() const override { return static_cast<int>(prior_.mean_hat.size()); }
  int n_train() const override { return prior_.n_train; }
  void posterior(const History& history, Vector& mean, Vector& var) const override;
  const DiscretePriorEstimate& prior() const { return prior_; }

 private:
  DiscretePriorEstimate prior_;
};

/// Estimated primal-form prior evaluated on a fixed candidate grid whose
/// feature matrix (K x M) is precomputed.
class ContinuousEstimatorModel final : public PosteriorModel {
 public:
  ContinuousEstimatorModel(ContinuousPriorEstimate prior, Matrix candidate_features)
      : prior_(std::move(prior)), cand_features_(std::move(candidate_features)) {}
  int n_candidates() const override { return static_cast<int>(cand_features_.cols()); }
  int n_train() const override { return prior_.n_train; }
  void posterior(const History& history, Vector& mean, Vector& var) const override;
  const ContinuousPriorEstimate& prior() const { return prior_; }

 private:
  ContinuousPriorEstimate prior_;
  Matrix cand_features_;
};

/// Exact GP posterior with the true prior (oracle mode).
class ExactGpModel final : public PosteriorModel {
 public:
  explicit ExactGpModel(GpPrior prior) : prior_(std::move(prior)) {}
  int n_candidates() const override { return prior_.size(); }
  int n_train() const override { return 0; }
  void posterior(const History& history, Vector& mean, Vector& var) const override;
  const GpPrior& prior() const { return prior_; }

 private:
  GpPrior prior_;
};

/// Noisy query oracle: returns y ~ N(f(x), sigma^2) for a candidate index.
using Objective = std::function<double(int index, Rng& rng)>;

struct BoResult {
  History history;
  std::string error;  // empty on success; set when the loop aborted early
};

/// Sequential BO loop: at step t the posterior is conditioned on exactly
/// the first t-1 observations, the acquisition is scored over unqueried
/// candidates and the argmax is observed. Deterministic given the seed. On
/// a module error the partial history is returned with the error tag set.
BoResult run_bo(const PosteriorModel& model, const Objective& objective, int t_steps,
                const AcquisitionConfig& acq, std::uint64_t seed,
                const Vector* true_f = nullptr);

/// r_T = max f - max_{queried} f.
double best_sample_simple_regret(const Vector& true_f, const History& history);

/// Position tau of the query with the largest noisy observation (ties ->
/// earliest); x_hat*_T = indices[tau].
int infer_argmax(const History& history);

/// R_T = max f - f(x_hat*_T).
double simple_regret(const Vector& true_f, const History& history);

struct RegretStep {
  int t = 0;
  double r_t = 0.0;
  double big_r_t = 0.0;
  double y_t = 0.0;
  double f_t = 0.0;
};

struct RegretRecord {
  std::vector<RegretStep> per_t;
  int inferred_argmax = -1;
};

RegretRecord regret_record(const Vector& true_f, const History& history);

}  // namespace metabo
