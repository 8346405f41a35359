#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "metabo/bo.hpp"
#include "metabo/completion.hpp"

namespace metabo {

struct KernelConfig {
  double lengthscale = 0.3;
  double signal_var = 1.0;
};

/// Squared-exponential kernel matrix between the rows of a and b.
Matrix se_kernel_matrix(const Matrix& a, const Matrix& b, const KernelConfig& kernel);

enum class Method { PemboUcb, PemboPi, OracleUcb, PlainMleUcb, Random };

std::string method_name(Method m);
Method parse_method(const std::string& name);

enum class Setting { Discrete, Continuous };

struct ExperimentConfig {
  Setting setting = Setting::Discrete;
  int m = 300;
  int n = 100;
  int t_steps = 50;
  int d = 2;
  int k = 100;
  double noise_sd = 0.1;
  double mask_rate = 0.0;
  KernelConfig kernel;
  int trials = 40;
  double delta = 0.1;
  std::vector<Method> methods{Method::PemboUcb, Method::OracleUcb, Method::Random};
  std::uint64_t seed = 0;
  double bandwidth = 0.0;        // 0 -> kernel.lengthscale
  double train_fraction = 1.0;   // leading fraction of tasks used for estimation
  std::optional<double> pi_target;
  int jobs = 0;                  // 0 -> hardware concurrency

  /// Number of training tasks the estimators actually see.
  int n_used() const;
  /// Basic field sanity; enough for dataset generation.
  void validate_data() const;
  /// Full check including per-method schedule preconditions.
  void validate() const;
};

/// One multi-task dataset plus its generating ground truth.
struct OfflineDataset {
  Matrix inputs;       // M x d shared grid
  GpPrior truth;       // ground-truth prior over the grid
  Matrix task_values;  // N x M noiseless f_i values, kept for validation
  OfflineMatrix observations;
};

/// N tasks drawn iid from the ground-truth prior on a fresh uniform grid,
/// with observation noise and (discrete setting only) uniform masking.
/// Deterministic given cfg.seed.
OfflineDataset generate_offline_dataset(const ExperimentConfig& cfg);

/// Function draws from a fixed prior; the factorization is done once.
class GpSampler {
 public:
  explicit GpSampler(const GpPrior& prior);
  Vector sample(std::uint64_t seed) const;

 private:
  Vector mean_;
  Matrix transform_;
};

/// Zero-mean squared-exponential GP whose hyperparameters (lengthscale,
/// signal variance, noise) are re-fit each step by a marginal-likelihood
/// grid search over a 10 x 10 x 5 log grid.
class MleGpModel final : public PosteriorModel {
 public:
  MleGpModel(Matrix inputs, int n_train_for_schedule);
  int n_candidates() const override { return static_cast<int>(dist2_.rows()); }
  int n_train() const override { return n_train_; }
  void posterior(const History& history, Vector& mean, Vector& var) const override;

 private:
  Matrix dist2_;  // pairwise squared distances over the candidate grid
  int n_train_;
  std::vector<double> ls_grid_, sv_grid_, noise_grid_;
};

struct TrialRow {
  Method method;
  int trial = 0;
  int t = 0;
  double y_best = 0.0;
  double r_t = 0.0;
  double big_r_t = 0.0;
};

struct AggregateRow {
  Method method;
  int t = 0;
  double mean_r = 0.0, se_r = 0.0;
  double mean_big_r = 0.0, se_big_r = 0.0;
  double mean_ybest = 0.0, se_ybest = 0.0;
};

struct ExperimentResult {
  std::vector<TrialRow> rows;
  std::vector<AggregateRow> aggregate;
  std::vector<std::string> skipped;  // "method,trial: reason" tags
};

/// Multi-trial regret experiment over the configured methods. Trials run in
/// parallel; rows and aggregates are emitted in (method, trial, t) order
/// regardless of completion order. Per-trial method failures are recorded in
/// `skipped` and excluded from aggregation.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Same, but against an existing dataset (missing-data and learning-curve
/// comparisons reuse one dataset across configs so seeds stay identical).
ExperimentResult run_experiment(const ExperimentConfig& cfg, const OfflineDataset& data);

/// Greedy rho_T for the dataset's ground-truth kernel.
double experiment_rho(const OfflineDataset& data, const ExperimentConfig& cfg);

/// Final-step r_T of every completed trial for one method.
std::vector<double> final_regrets(const ExperimentResult& result, Method method);

}  // namespace metabo
