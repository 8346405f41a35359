#include "metabo/bench.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "metabo/stats.hpp"

namespace metabo {

Matrix se_kernel_matrix(const Matrix& a, const Matrix& b, const KernelConfig& kernel) {
  const double inv2l2 = 0.5 / (kernel.lengthscale * kernel.lengthscale);
  Matrix out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      out(i, j) = kernel.signal_var *
                  std::exp(-inv2l2 * (a.row(i) - b.row(j)).squaredNorm());
  return out;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::PemboUcb: return "pembo-ucb";
    case Method::PemboPi: return "pembo-pi";
    case Method::OracleUcb: return "oracle-ucb";
    case Method::PlainMleUcb: return "plain-mle-ucb";
    case Method::Random: return "random";
  }
  throw std::logic_error("unknown method");
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::PemboUcb, Method::PemboPi, Method::OracleUcb, Method::PlainMleUcb,
                   Method::Random})
    if (method_name(m) == name) return m;
  throw std::invalid_argument("unknown method: " + name);
}

int ExperimentConfig::n_used() const {
  return std::max(2, static_cast<int>(std::llround(train_fraction * n)));
}

void ExperimentConfig::validate_data() const {
  if (m < 1 || n < 1 || d < 1 || k < 1) throw std::invalid_argument("experiment: bad dimensions");
  if (t_steps < 0) throw std::invalid_argument("experiment: negative T");
  if (noise_sd < 0.0) throw std::invalid_argument("experiment: negative noise");
  if (!(mask_rate >= 0.0 && mask_rate < 1.0))
    throw std::invalid_argument("experiment: mask_rate outside [0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("experiment: delta outside (0,1)");
  if (!(kernel.lengthscale > 0.0 && kernel.signal_var > 0.0))
    throw std::invalid_argument("experiment: bad kernel");
  if (!(train_fraction > 0.0 && train_fraction <= 1.0))
    throw std::invalid_argument("experiment: train_fraction outside (0,1]");
}

void ExperimentConfig::validate() const {
  validate_data();
  if (trials < 1) throw std::invalid_argument("experiment: trials < 1");
  if (t_steps > m) throw std::invalid_argument("experiment: T exceeds candidate count");
  if (methods.empty()) throw std::invalid_argument("experiment: no methods");
  const int nu = n_used();
  for (Method method : methods) {
    const bool scheduled = method == Method::PemboUcb || method == Method::PlainMleUcb;
    if (scheduled && nu < 4.0 * std::log(6.0 / delta) + t_steps + 2.0)
      throw std::invalid_argument("experiment: N too small for the UCB schedule (" +
                                  method_name(method) + ")");
    if (method == Method::PemboPi && nu < t_steps + 2)
      throw std::invalid_argument("experiment: N too small for pembo-pi");
    const bool continuous_est = setting == Setting::Continuous &&
                                (method == Method::PemboUcb || method == Method::PemboPi);
    if (continuous_est) {
      if (t_steps >= k) throw std::invalid_argument("experiment: T must be < K (continuous)");
      if (m < k) throw std::invalid_argument("experiment: M must be >= K (continuous)");
    }
  }
}

OfflineDataset generate_offline_dataset(const ExperimentConfig& cfg) {
  cfg.validate_data();
  OfflineDataset data;

  Rng grid_rng(derive_seed(cfg.seed, "grid"));
  data.inputs.resize(cfg.m, cfg.d);
  for (int i = 0; i < cfg.m; ++i)
    for (int j = 0; j < cfg.d; ++j) data.inputs(i, j) = grid_rng.uniform();

  data.truth.mean = Vector::Zero(cfg.m);
  data.truth.cov = se_kernel_matrix(data.inputs, data.inputs, cfg.kernel);
  data.truth.noise_sd = cfg.noise_sd;

  const GpSampler sampler(data.truth);
  data.task_values.resize(cfg.n, cfg.m);
  for (int i = 0; i < cfg.n; ++i)
    data.task_values.row(i) = sampler.sample(derive_seed(cfg.seed, "offline-task", i)).transpose();

  Rng noise_rng(derive_seed(cfg.seed, "offline-noise"));
  data.observations.values.resize(cfg.n, cfg.m);
  for (int i = 0; i < cfg.n; ++i)
    for (int j = 0; j < cfg.m; ++j)
      data.observations.values(i, j) = data.task_values(i, j) + cfg.noise_sd * noise_rng.normal();

  data.observations.mask.setConstant(cfg.n, cfg.m, true);
  if (cfg.setting == Setting::Discrete && cfg.mask_rate > 0.0) {
    Rng mask_rng(derive_seed(cfg.seed, "mask"));
    for (int i = 0; i < cfg.n; ++i)
      for (int j = 0; j < cfg.m; ++j)
        data.observations.mask(i, j) = mask_rng.uniform() >= cfg.mask_rate;
  }
  data.observations.noise_sd_hint = cfg.noise_sd;
  return data;
}

GpSampler::GpSampler(const GpPrior& prior) : mean_(prior.mean) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(prior.cov));
  if (es.info() != Eigen::Success) throw std::runtime_error("indefinite covariance");
  const double tol = psd_tolerance(prior.cov) + 1e-12;
  if (prior.size() > 0 && es.eigenvalues().minCoeff() < -tol)
    throw std::runtime_error("indefinite covariance");
  transform_ = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Vector GpSampler::sample(std::uint64_t seed) const {
  Rng rng(seed);
  Vector z(mean_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return mean_ + transform_ * z;
}

namespace {

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i)
    out[i] = lo * std::pow(hi / lo, count == 1 ? 0.0 : static_cast<double>(i) / (count - 1));
  return out;
}

}  // namespace

MleGpModel::MleGpModel(Matrix inputs, int n_train_for_schedule)
    : n_train_(n_train_for_schedule),
      ls_grid_(log_grid(0.03, 3.0, 10)),
      sv_grid_(log_grid(0.1, 10.0, 10)),
      noise_grid_(log_grid(1e-3, 1.0, 5)) {
  const int m = static_cast<int>(inputs.rows());
  dist2_.resize(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) dist2_(i, j) = (inputs.row(i) - inputs.row(j)).squaredNorm();
}

void MleGpModel::posterior(const History& history, Vector& mean, Vector& var) const {
  const int m = n_candidates();
  const int t = history.size();
  if (t == 0) {
    mean = Vector::Zero(m);
    var = Vector::Constant(m, sv_grid_[sv_grid_.size() / 2]);
    return;
  }

  Eigen::Map<const Vector> ys(history.observations.data(), t);
  Matrix d2q(t, t);
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j) d2q(i, j) = dist2_(history.indices[i], history.indices[j]);

  double best_ll = -std::numeric_limits<double>::infinity();
  double best_ls = ls_grid_.front(), best_sv = sv_grid_.front(), best_noise = noise_grid_.front();
  for (double ls : ls_grid_) {
    const Matrix corr = (-0.5 / (ls * ls) * d2q.array()).exp();
    for (double sv : sv_grid_) {
      for (double noise : noise_grid_) {
        Matrix a = sv * corr;
        a.diagonal().array() += noise * noise;
        Eigen::LLT<Matrix> llt(a);
        if (llt.info() != Eigen::Success) continue;
        const Vector alpha = llt.solve(ys);
        const double ll = -0.5 * ys.dot(alpha) -
                          llt.matrixLLT().diagonal().array().log().sum() -
                          0.5 * t * std::log(2.0 * std::numbers::pi);
        if (ll > best_ll) {
          best_ll = ll;
          best_ls = ls;
          best_sv = sv;
          best_noise = noise;
        }
      }
    }
  }

  Matrix a = best_sv * (-0.5 / (best_ls * best_ls) * d2q.array()).exp().matrix();
  a.diagonal().array() += best_noise * best_noise;
  const SpdFactor factor(a);
  Matrix kxq(m, t);
  for (int i = 0; i < t; ++i)
    kxq.col(i) =
        best_sv * (-0.5 / (best_ls * best_ls) * dist2_.col(history.indices[i]).array()).exp();
  mean = kxq * factor.solve(Vector(ys));
  const Matrix b = factor.solve(Matrix(kxq.transpose()));
  var.resize(m);
  for (int i = 0; i < m; ++i) var[i] = best_sv - kxq.row(i).dot(b.col(i));
}

namespace {

struct TrialContext {
  const ExperimentConfig& cfg;
  const OfflineDataset& data;
  std::shared_ptr<const PosteriorModel> pembo_model;
  std::shared_ptr<const PosteriorModel> oracle_model;
  std::shared_ptr<const PosteriorModel> mle_model;
  double f_star = 0.0;
  GpSampler sampler;
};

History run_random_method(const ExperimentConfig& cfg, const Vector& f, std::uint64_t seed) {
  Rng rng(seed);
  History h;
  for (int t = 1; t <= cfg.t_steps; ++t) {
    Vector scores(cfg.m);
    for (int i = 0; i < cfg.m; ++i) scores[i] = rng.uniform();
    const int x = select_next(scores, h.indices);
    h.indices.push_back(x);
    h.observations.push_back(f[x] + cfg.noise_sd * rng.normal());
    h.true_values.push_back(f[x]);
  }
  return h;
}

void emit_rows(Method method, int trial, const Vector& f, const History& h,
               std::vector<TrialRow>& rows) {
  const RegretRecord rec = regret_record(f, h);
  double y_best = -std::numeric_limits<double>::infinity();
  for (const RegretStep& step : rec.per_t) {
    y_best = std::max(y_best, step.y_t);
    rows.push_back({method, trial, step.t, y_best, step.r_t, step.big_r_t});
  }
}

void run_trial(const TrialContext& ctx, int trial, std::vector<TrialRow>& rows,
               std::vector<std::string>& skips) {
  const ExperimentConfig& cfg = ctx.cfg;
  const Vector f = ctx.sampler.sample(derive_seed(cfg.seed, "test-function", trial));

  for (Method method : cfg.methods) {
    const std::uint64_t run_seed =
        derive_seed(cfg.seed, "observe-" + method_name(method), trial);
    try {
      History h;
      if (method == Method::Random) {
        h = run_random_method(cfg, f, run_seed);
      } else {
        const PosteriorModel* model = nullptr;
        AcquisitionConfig acq;
        acq.delta = cfg.delta;
        switch (method) {
          case Method::PemboUcb:
            model = ctx.pembo_model.get();
            acq.kind = AcquisitionKind::Ucb;
            acq.n_train = model->n_train();
            break;
          case Method::PemboPi:
            model = ctx.pembo_model.get();
            acq.kind = AcquisitionKind::Pi;
            acq.n_train = model->n_train();
            acq.f_star_hat = ctx.f_star;
            break;
          case Method::OracleUcb:
            model = ctx.oracle_model.get();
            acq.kind = AcquisitionKind::Ucb;
            acq.fixed_zeta = std::sqrt(2.0 * std::log(3.0 / cfg.delta));
            break;
          case Method::PlainMleUcb:
            model = ctx.mle_model.get();
            acq.kind = AcquisitionKind::Ucb;
            acq.n_train = model->n_train();
            break;
          default:
            throw std::logic_error("unhandled method");
        }
        const double sigma = cfg.noise_sd;
        const Objective objective = [&f, sigma](int idx, Rng& rng) {
          return f[idx] + sigma * rng.normal();
        };
        BoResult result = run_bo(*model, objective, cfg.t_steps, acq, run_seed, &f);
        if (!result.error.empty())
          throw std::runtime_error(result.error);
        h = std::move(result.history);
      }
      emit_rows(method, trial, f, h, rows);
    } catch (const std::exception& e) {
      skips.push_back(method_name(method) + ",trial=" + std::to_string(trial) + ": " + e.what());
    }
  }
}

bool wants(const ExperimentConfig& cfg, Method method) {
  for (Method m : cfg.methods)
    if (m == method) return true;
  return false;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  return run_experiment(cfg, generate_offline_dataset(cfg));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const OfflineDataset& data) {
  cfg.validate();
  if (data.observations.n_inputs() != cfg.m)
    throw std::invalid_argument("run_experiment: dataset does not match config");
  const int nu = std::min(cfg.n_used(), data.observations.n_tasks());

  TrialContext ctx{cfg, data, nullptr, nullptr, nullptr, 0.0, GpSampler(data.truth)};

  const bool needs_pembo = wants(cfg, Method::PemboUcb) || wants(cfg, Method::PemboPi);
  if (needs_pembo) {
    OfflineMatrix train;
    train.values = data.observations.values.topRows(nu);
    train.mask = data.observations.mask.topRows(nu);
    train.noise_sd_hint = data.observations.noise_sd_hint;
    if (!train.complete()) {
      CompletionConfig comp;
      comp.max_rank = std::min(train.n_tasks(), train.n_inputs());
      Matrix zero_filled = Matrix::Zero(train.n_tasks(), train.n_inputs());
      for (int i = 0; i < train.n_tasks(); ++i)
        for (int j = 0; j < train.n_inputs(); ++j)
          if (train.mask(i, j)) zero_filled(i, j) = train.values(i, j);
      Eigen::BDCSVD<Matrix> svd(zero_filled);
      comp.shrink = svd.singularValues()[0] / 50.0;
      comp.max_iters = 150;
      comp.tol = 1e-9;
      train = complete_matrix(train, comp);
    }

    double max_prior_var = 0.0;
    if (cfg.setting == Setting::Discrete) {
      DiscretePriorEstimate prior = estimate_prior_discrete(train);
      max_prior_var = prior.cov_hat.diagonal().maxCoeff();
      ctx.pembo_model = std::make_shared<DiscreteEstimatorModel>(std::move(prior));
    } else {
      const double bandwidth = cfg.bandwidth > 0.0 ? cfg.bandwidth : cfg.kernel.lengthscale;
      const FeatureMap features =
          make_cosine_features(cfg.d, cfg.k, bandwidth, derive_seed(cfg.seed, "features"));
      const Matrix design = features.features(data.inputs);  // K x M
      const Matrix weights = fit_task_weights_all(design, train.values);
      ContinuousPriorEstimate prior = estimate_prior_continuous(weights, design, features);
      const Matrix tmp = prior.sigma_hat * design;
      max_prior_var = (design.cwiseProduct(tmp)).colwise().sum().maxCoeff();
      ctx.pembo_model = std::make_shared<ContinuousEstimatorModel>(std::move(prior), design);
    }

    if (wants(cfg, Method::PemboPi)) {
      if (cfg.pi_target) {
        ctx.f_star = *cfg.pi_target;
      } else {
        double max_obs = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < nu; ++i)
          for (int j = 0; j < cfg.m; ++j)
            if (data.observations.mask(i, j))
              max_obs = std::max(max_obs, data.observations.values(i, j));
        ctx.f_star = max_obs + 3.0 * std::sqrt(std::max(max_prior_var, 0.0));
      }
    }
  }
  if (wants(cfg, Method::OracleUcb)) ctx.oracle_model = std::make_shared<ExactGpModel>(data.truth);
  if (wants(cfg, Method::PlainMleUcb))
    ctx.mle_model = std::make_shared<MleGpModel>(data.inputs, cfg.n);

  std::vector<std::vector<TrialRow>> trial_rows(cfg.trials);
  std::vector<std::vector<std::string>> trial_skips(cfg.trials);

  unsigned hw = std::thread::hardware_concurrency();
  int jobs = cfg.jobs > 0 ? cfg.jobs : static_cast<int>(hw ? hw : 1);
  jobs = std::max(1, std::min(jobs, cfg.trials));

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int tr = next.fetch_add(1); tr < cfg.trials; tr = next.fetch_add(1))
      run_trial(ctx, tr, trial_rows[tr], trial_skips[tr]);
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  ExperimentResult result;
  for (Method method : cfg.methods)
    for (int tr = 0; tr < cfg.trials; ++tr)
      for (const TrialRow& row : trial_rows[tr])
        if (row.method == method) result.rows.push_back(row);
  for (int tr = 0; tr < cfg.trials; ++tr)
    for (const std::string& tag : trial_skips[tr]) result.skipped.push_back(tag);

  for (Method method : cfg.methods) {
    for (int t = 1; t <= cfg.t_steps; ++t) {
      std::vector<const TrialRow*> group;
      for (const TrialRow& row : result.rows)
        if (row.method == method && row.t == t) group.push_back(&row);
      if (group.empty()) continue;
      const double cnt = static_cast<double>(group.size());
      AggregateRow agg;
      agg.method = method;
      agg.t = t;
      double sr = 0.0, sbr = 0.0, sy = 0.0;
      for (const TrialRow* row : group) {
        sr += row->r_t;
        sbr += row->big_r_t;
        sy += row->y_best;
      }
      agg.mean_r = sr / cnt;
      agg.mean_big_r = sbr / cnt;
      agg.mean_ybest = sy / cnt;
      double vr = 0.0, vbr = 0.0, vy = 0.0;
      for (const TrialRow* row : group) {
        vr += (row->r_t - agg.mean_r) * (row->r_t - agg.mean_r);
        vbr += (row->big_r_t - agg.mean_big_r) * (row->big_r_t - agg.mean_big_r);
        vy += (row->y_best - agg.mean_ybest) * (row->y_best - agg.mean_ybest);
      }
      if (group.size() > 1) {
        agg.se_r = std::sqrt(vr / (cnt - 1.0) / cnt);
        agg.se_big_r = std::sqrt(vbr / (cnt - 1.0) / cnt);
        agg.se_ybest = std::sqrt(vy / (cnt - 1.0) / cnt);
      }
      result.aggregate.push_back(agg);
    }
  }
  return result;
}

double experiment_rho(const OfflineDataset& data, const ExperimentConfig& cfg) {
  return greedy_max_info_gain(data.truth.cov, cfg.noise_sd, cfg.t_steps);
}

std::vector<double> final_regrets(const ExperimentResult& result, Method method) {
  std::vector<double> out;
  int t_max = 0;
  for (const TrialRow& row : result.rows)
    if (row.method == method) t_max = std::max(t_max, row.t);
  for (const TrialRow& row : result.rows)
    if (row.method == method && row.t == t_max) out.push_back(row.r_t);
  return out;
}

}  // namespace metabo
