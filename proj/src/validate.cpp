#include "metabo/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace metabo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> shuffled_indices(int m, Rng& rng) {
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = m - 1; i > 0; --i) std::swap(idx[i], idx[rng.uniform_int(i + 1)]);
  return idx;
}

/// Row sampler for N(mean, cov): factorization once, one seed per draw.
struct RowSampler {
  Vector mean;
  Matrix transform;

  explicit RowSampler(const Vector& mu, const Matrix& cov) : mean(mu) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(cov));
    transform = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  Vector draw(Rng& rng) const {
    Vector z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    return mean + transform * z;
  }
};

}  // namespace

bool ValidationReport::all_pass() const {
  for (const CheckRow& row : rows)
    if (!row.pass) return false;
  return true;
}

std::string ValidationReport::text() const {
  std::ostringstream os;
  for (const CheckRow& row : rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-52s statistic=%-14.6g threshold=%-14.6g %s\n",
                  row.check.c_str(), row.statistic, row.threshold,
                  row.pass ? "PASS" : "FAIL");
    os << buf;
  }
  return os.str();
}

void ValidationReport::append(const ValidationReport& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

ValidationReport validate_lemma1(const Lemma1Config& cfg) {
  if (cfg.replications < 100) throw std::invalid_argument("insufficient replications");
  if (cfg.t > cfg.n - 2) throw std::invalid_argument("lemma1: t > N-2");

  Rng grid_rng(derive_seed(cfg.seed, "lemma1-grid"));
  Matrix inputs(cfg.m, 1);
  for (int i = 0; i < cfg.m; ++i) inputs(i, 0) = grid_rng.uniform();

  GpPrior truth;
  truth.mean = Vector::Zero(cfg.m);
  truth.cov = se_kernel_matrix(inputs, inputs, cfg.kernel);
  truth.noise_sd = cfg.noise_sd;

  // Frozen history: t distinct indices, one function draw, one noise draw.
  Rng hist_rng(derive_seed(cfg.seed, "lemma1-history"));
  const std::vector<int> order = shuffled_indices(cfg.m, hist_rng);
  History history;
  history.indices.assign(order.begin(), order.begin() + cfg.t);
  const Vector f0 = sample_function(truth, derive_seed(cfg.seed, "lemma1-f0"));
  for (int i = 0; i < cfg.t; ++i)
    history.observations.push_back(f0[history.indices[i]] + cfg.noise_sd * hist_rng.normal());

  // Reference posterior from the true prior (optionally a wrong sigma as a
  // negative control for the bias checks).
  GpPrior ref = truth;
  ref.noise_sd = cfg.reference_noise_sd.value_or(cfg.noise_sd);
  const ExactPosterior exact = exact_posterior(ref, history);
  const double ref_s2 = ref.noise_sd * ref.noise_sd;

  std::vector<int> unqueried;
  for (int i = 0; i < cfg.m; ++i)
    if (std::find(history.indices.begin(), history.indices.end(), i) == history.indices.end())
      unqueried.push_back(i);
  const int u = static_cast<int>(unqueried.size());
  std::vector<int> probes;
  if (u > 0) probes = {unqueried[0], unqueried[u / 2], unqueried[u - 1]};

  // Training rows are iid N(mu, k + sigma^2 I); the true sigma always
  // generates the data, only the reference may be perturbed.
  const RowSampler row_sampler(
      truth.mean,
      Matrix(truth.cov + cfg.noise_sd * cfg.noise_sd * Matrix::Identity(cfg.m, cfg.m)));

  Vector sum_mu = Vector::Zero(u), sumsq_mu = Vector::Zero(u);
  Vector sum_k = Vector::Zero(u), sumsq_k = Vector::Zero(u);
  const int n_deltas = static_cast<int>(cfg.deltas.size());
  Matrix cov_mu = Matrix::Zero(u, n_deltas);
  Matrix cov_up = Matrix::Zero(u, n_deltas);
  Matrix cov_lo = Matrix::Zero(u, n_deltas);
  std::vector<std::vector<double>> ks_samples(probes.size());

  std::vector<ConcentrationConstants> consts;
  for (double delta : cfg.deltas) consts.push_back(concentration_constants(cfg.n, cfg.t, delta));

  OfflineMatrix table;
  table.values.resize(cfg.n, cfg.m);
  table.mask.setConstant(cfg.n, cfg.m, true);

  for (int rep = 0; rep < cfg.replications; ++rep) {
    Rng rng(derive_seed(cfg.seed, "lemma1-rep", rep));
    for (int i = 0; i < cfg.n; ++i) table.values.row(i) = row_sampler.draw(rng).transpose();

    const DiscretePriorEstimate prior = estimate_prior_discrete(table);
    const PosteriorEstimate post = estimate_posterior_discrete(prior, history);

    for (int ui = 0; ui < u; ++ui) {
      const int x = unqueried[ui];
      const double mu_hat = post.mean_hat_t[x];
      const double k_hat = post.var_hat_t[x];
      const double mu_ref = exact.mean_t[x];
      const double v_ref = exact.cov_t(x, x) + ref_s2;
      sum_mu[ui] += mu_hat;
      sumsq_mu[ui] += mu_hat * mu_hat;
      sum_k[ui] += k_hat;
      sumsq_k[ui] += k_hat * k_hat;
      for (int di = 0; di < n_deltas; ++di) {
        const double err2 = (mu_hat - mu_ref) * (mu_hat - mu_ref);
        if (err2 < consts[di].a_t * v_ref) cov_mu(ui, di) += 1.0;
        const double ratio = k_hat / v_ref;
        if (ratio < chi_square_upper_multiplier(consts[di].b_t)) cov_up(ui, di) += 1.0;
        if (ratio > chi_square_lower_multiplier(consts[di].b_t)) cov_lo(ui, di) += 1.0;
      }
    }
    if (rep < cfg.ks_replications)
      for (std::size_t p = 0; p < probes.size(); ++p) {
        const int x = probes[p];
        const double v_ref = exact.cov_t(x, x) + ref_s2;
        ks_samples[p].push_back((cfg.n - cfg.t - 1) * post.var_hat_t[x] / v_ref);
      }
  }

  ValidationReport report;
  const double r = static_cast<double>(cfg.replications);
  double max_z_mu = 0.0, max_z_k = 0.0;
  for (int ui = 0; ui < u; ++ui) {
    const int x = unqueried[ui];
    const double mean_mu = sum_mu[ui] / r;
    const double sd_mu = std::sqrt(std::max((sumsq_mu[ui] - r * mean_mu * mean_mu) / (r - 1), 0.0));
    max_z_mu = std::max(max_z_mu, std::abs(mean_mu - exact.mean_t[x]) / (sd_mu / std::sqrt(r)));
    const double mean_k = sum_k[ui] / r;
    const double sd_k = std::sqrt(std::max((sumsq_k[ui] - r * mean_k * mean_k) / (r - 1), 0.0));
    const double v_ref = exact.cov_t(x, x) + ref_s2;
    max_z_k = std::max(max_z_k, std::abs(mean_k - v_ref) / (sd_k / std::sqrt(r)));
  }
  report.rows.push_back({"lemma1/bias-mu-max-z", max_z_mu, 4.0, max_z_mu <= 4.0});
  report.rows.push_back({"lemma1/bias-k-max-z", max_z_k, 4.0, max_z_k <= 4.0});

  for (int di = 0; di < n_deltas; ++di) {
    const double need = 1.0 - cfg.deltas[di] - 0.02;
    const double fmu = cov_mu.col(di).minCoeff() / r;
    const double fup = cov_up.col(di).minCoeff() / r;
    const double flo = cov_lo.col(di).minCoeff() / r;
    std::ostringstream tag;
    tag << "delta=" << cfg.deltas[di];
    report.rows.push_back({"lemma1/coverage-mu " + tag.str(), fmu, need, fmu >= need});
    report.rows.push_back({"lemma1/coverage-k-upper " + tag.str(), fup, need, fup >= need});
    report.rows.push_back({"lemma1/coverage-k-lower " + tag.str(), flo, need, flo >= need});
  }

  const double dof = cfg.n - cfg.t - 1;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const KsResult ks =
        ks_test(ks_samples[p], [dof](double x) { return chi2_cdf(x, dof); }, 0.01);
    report.rows.push_back({"lemma1/ks-chi2 probe=" + std::to_string(probes[p]), ks.statistic,
                           ks.critical, ks.accept});
  }
  return report;
}

ValidationReport validate_lemma3(const Lemma3Config& cfg) {
  if (cfg.replications < 100) throw std::invalid_argument("insufficient replications");
  if (cfg.t >= cfg.k) throw std::invalid_argument("lemma3: t must be < K");
  if (cfg.m < cfg.k) throw std::invalid_argument("lemma3: M must be >= K");

  const FeatureMap features =
      make_cosine_features(cfg.d, cfg.k, cfg.bandwidth, derive_seed(cfg.seed, "lemma3-features"));
  Rng grid_rng(derive_seed(cfg.seed, "lemma3-grid"));
  Matrix xbar(cfg.m, cfg.d);
  for (int i = 0; i < cfg.m; ++i)
    for (int j = 0; j < cfg.d; ++j) xbar(i, j) = grid_rng.uniform();
  const Matrix design = features.features(xbar);  // K x M
  const Matrix gram_inv =
      symmetrize(SpdFactor(Matrix(design * design.transpose()))
                     .solve(Matrix(Matrix::Identity(cfg.k, cfg.k))));

  // Synthetic truth (u, Sigma).
  Rng truth_rng(derive_seed(cfg.seed, "lemma3-truth"));
  Vector u_true(cfg.k);
  for (int i = 0; i < cfg.k; ++i) u_true[i] = 0.5 * truth_rng.normal();
  Matrix a(cfg.k, cfg.k);
  for (int i = 0; i < cfg.k; ++i)
    for (int j = 0; j < cfg.k; ++j) a(i, j) = truth_rng.normal();
  const Matrix sigma_true = Matrix(a * a.transpose()) / static_cast<double>(cfg.k);

  // Query points are fixed at a farthest-point subset of the grid and the
  // observed values are redrawn every replication together with the
  // training set, so the empirical frequencies estimate the joint
  // probability the concentration statement is about. Clustered query
  // points make Phi_t' S Phi_t nearly singular along a direction the full
  // observation noise still excites, which inflates the quadratic K term
  // beyond what a_t budgets for; the concentration claim is only meaningful
  // on separated queries (the acquisition never re-queries a known point).
  Rng hist_rng(derive_seed(cfg.seed, "lemma3-history"));
  std::vector<int> hist_idx{hist_rng.uniform_int(cfg.m)};
  while (static_cast<int>(hist_idx.size()) < cfg.t) {
    int best = -1;
    double best_dist = -1.0;
    for (int i = 0; i < cfg.m; ++i) {
      double nearest = 1e300;
      for (int q : hist_idx) nearest = std::min(nearest, (xbar.row(i) - xbar.row(q)).norm());
      if (nearest > best_dist) {
        best_dist = nearest;
        best = i;
      }
    }
    hist_idx.push_back(best);
  }
  Matrix phi_t(cfg.k, cfg.t);
  for (int i = 0; i < cfg.t; ++i) phi_t.col(i) = design.col(hist_idx[i]);
  const RowSampler w_sampler(u_true, sigma_true);

  // Effective weight covariance S = Sigma + sigma^2 G^-1 (or the
  // identity-gram negative control): the law the fitted weights follow.
  const Matrix gram_ref =
      cfg.identity_gram_control ? Matrix(Matrix::Identity(cfg.k, cfg.k)) : gram_inv;
  const Matrix s_eff = sigma_true + cfg.noise_sd * cfg.noise_sd * gram_ref;

  Rng probe_rng(derive_seed(cfg.seed, "lemma3-probes"));
  Matrix probes(cfg.probes, cfg.d);
  for (int i = 0; i < cfg.probes; ++i)
    for (int j = 0; j < cfg.d; ++j) probes(i, j) = probe_rng.uniform();
  const Matrix probe_phi = features.features(probes);  // K x P

  // The posterior covariances do not depend on the observed values, so the
  // variance references are fixed across replications.
  Vector var_ref(cfg.probes), var_lit(cfg.probes);
  {
    Vector u_tmp;
    Matrix s_ref, s_lit;
    exact_weight_posterior(u_true, s_eff, phi_t, Vector::Zero(cfg.t), 0.0, u_tmp, s_ref);
    exact_weight_posterior(u_true, sigma_true, phi_t, Vector::Zero(cfg.t), cfg.noise_sd, u_tmp,
                           s_lit);
    for (int p = 0; p < cfg.probes; ++p) {
      const Vector phi = probe_phi.col(p);
      var_ref[p] = phi.dot(s_ref * phi);
      var_lit[p] = phi.dot(s_lit * phi) +
                   cfg.noise_sd * cfg.noise_sd * phi.dot(gram_inv * phi);
    }
  }
  const Matrix s_eff_phi = s_eff * phi_t;  // K x t, for the per-rep mean reference
  const SpdFactor s_eff_inner(Matrix(phi_t.transpose() * s_eff_phi));

  const int n_deltas = static_cast<int>(cfg.deltas.size());
  std::vector<ConcentrationConstants> consts;
  for (double delta : cfg.deltas) consts.push_back(concentration_constants(cfg.n, cfg.t, delta));

  Vector sum_mu = Vector::Zero(cfg.probes), sumsq_mu = Vector::Zero(cfg.probes);
  Vector sum_k = Vector::Zero(cfg.probes), sumsq_k = Vector::Zero(cfg.probes);
  Matrix cov_mu = Matrix::Zero(cfg.probes, n_deltas);
  Matrix cov_up = Matrix::Zero(cfg.probes, n_deltas);
  Matrix cov_lo = Matrix::Zero(cfg.probes, n_deltas);

  for (int rep = 0; rep < cfg.replications; ++rep) {
    Rng rng(derive_seed(cfg.seed, "lemma3-rep", rep));

    // Fresh test function and observations at the fixed query points.
    const Vector w0 = w_sampler.draw(rng);
    Vector ys(cfg.t);
    for (int i = 0; i < cfg.t; ++i)
      ys[i] = phi_t.col(i).dot(w0) + cfg.noise_sd * rng.normal();
    const Vector u_ref =
        u_true + s_eff_phi * s_eff_inner.solve(Vector(ys - phi_t.transpose() * u_true));

    Matrix weights(cfg.n, cfg.k);
    for (int i = 0; i < cfg.n; ++i) weights.row(i) = w_sampler.draw(rng).transpose();
    Matrix obs = weights * design;  // N x M
    for (int i = 0; i < cfg.n; ++i)
      for (int j = 0; j < cfg.m; ++j) obs(i, j) += cfg.noise_sd * rng.normal();

    const Matrix what = fit_task_weights_all(design, obs);
    const ContinuousPriorEstimate prior = estimate_prior_continuous(what, design, features);
    const ContinuousPosterior post = estimate_posterior_continuous(prior, phi_t, ys);

    for (int p = 0; p < cfg.probes; ++p) {
      const Vector phi = probe_phi.col(p);
      const double mu_hat = phi.dot(post.u_hat_t);
      const double k_hat = phi.dot(post.sigma_hat_t * phi);
      const double mu_ref_p = phi.dot(u_ref);
      const double diff = mu_hat - mu_ref_p;
      sum_mu[p] += diff;
      sumsq_mu[p] += diff * diff;
      sum_k[p] += k_hat;
      sumsq_k[p] += k_hat * k_hat;
      for (int di = 0; di < n_deltas; ++di) {
        if (diff * diff < consts[di].a_t * var_ref[p]) cov_mu(p, di) += 1.0;
        const double ratio = k_hat / var_ref[p];
        if (ratio < chi_square_upper_multiplier(consts[di].b_t)) cov_up(p, di) += 1.0;
        if (ratio > chi_square_lower_multiplier(consts[di].b_t)) cov_lo(p, di) += 1.0;
      }
    }
  }

  ValidationReport report;
  const double r = static_cast<double>(cfg.replications);
  double max_z_mu = 0.0, max_z_k = 0.0, max_gap = 0.0;
  for (int p = 0; p < cfg.probes; ++p) {
    // sum_mu accumulated the per-replication differences to the reference.
    const double mean_mu = sum_mu[p] / r;
    const double sd_mu = std::sqrt(std::max((sumsq_mu[p] - r * mean_mu * mean_mu) / (r - 1), 0.0));
    max_z_mu = std::max(max_z_mu, std::abs(mean_mu) / (sd_mu / std::sqrt(r)));
    const double mean_k = sum_k[p] / r;
    const double sd_k = std::sqrt(std::max((sumsq_k[p] - r * mean_k * mean_k) / (r - 1), 0.0));
    max_z_k = std::max(max_z_k, std::abs(mean_k - var_ref[p]) / (sd_k / std::sqrt(r)));
    max_gap = std::max(max_gap, std::abs(mean_k - var_lit[p]) / var_lit[p]);
  }
  report.rows.push_back({"lemma3/bias-mu-max-z", max_z_mu, 4.0, max_z_mu <= 4.0});
  report.rows.push_back({"lemma3/bias-k-max-z", max_z_k, 4.0, max_z_k <= 4.0});
  report.rows.push_back({"lemma3/sigma2-form-gap (diagnostic)", max_gap, kInf, true});

  for (int di = 0; di < n_deltas; ++di) {
    const double need = 1.0 - cfg.deltas[di] - 0.02;
    std::ostringstream tag;
    tag << "delta=" << cfg.deltas[di];
    const double fmu = cov_mu.col(di).minCoeff() / r;
    const double fup = cov_up.col(di).minCoeff() / r;
    const double flo = cov_lo.col(di).minCoeff() / r;
    report.rows.push_back({"lemma3/coverage-mu " + tag.str(), fmu, need, fmu >= need});
    report.rows.push_back({"lemma3/coverage-k-upper " + tag.str(), fup, need, fup >= need});
    report.rows.push_back({"lemma3/coverage-k-lower " + tag.str(), flo, need, flo >= need});
  }
  return report;
}

ValidationReport validate_lemma4(const Lemma4Config& cfg) {
  if (cfg.runs < 100) throw std::invalid_argument("insufficient replications");

  Rng grid_rng(derive_seed(cfg.seed, "lemma4-grid"));
  Matrix inputs(cfg.m, cfg.d);
  for (int i = 0; i < cfg.m; ++i)
    for (int j = 0; j < cfg.d; ++j) inputs(i, j) = grid_rng.uniform();
  GpPrior truth;
  truth.mean = Vector::Zero(cfg.m);
  truth.cov = se_kernel_matrix(inputs, inputs, cfg.kernel);
  truth.noise_sd = cfg.noise_sd;
  const GpSampler sampler(truth);

  const double gap_bound =
      2.0 * cfg.noise_sd * std::sqrt(2.0 * std::log(1.0 / cfg.delta));
  int hold = 0;
  for (int run = 0; run < cfg.runs; ++run) {
    const Vector f = sampler.sample(derive_seed(cfg.seed, "lemma4-f", run));
    Rng rng(derive_seed(cfg.seed, "lemma4-run", run));
    const std::vector<int> order = shuffled_indices(cfg.m, rng);
    History h;
    for (int i = 0; i < cfg.t_steps; ++i) {
      h.indices.push_back(order[i]);
      h.observations.push_back(f[order[i]] + cfg.noise_sd * rng.normal());
    }
    const double r_t = best_sample_simple_regret(f, h);
    const double big_r = simple_regret(f, h);
    if (big_r - r_t <= gap_bound) ++hold;
  }

  ValidationReport report;
  const double freq = static_cast<double>(hold) / cfg.runs;
  const double need = 1.0 - cfg.delta - 0.02;
  report.rows.push_back({"lemma4/gap-coverage", freq, need, freq >= need});
  return report;
}

ValidationReport validate_tails(std::uint64_t seed, int draws) {
  if (draws < 1000) throw std::invalid_argument("insufficient replications");
  ValidationReport report;

  Rng grng(derive_seed(seed, "tails-gauss"));
  std::vector<double> z(draws);
  for (double& v : z) v = grng.normal();
  for (double d0 : {0.05, 0.1}) {
    const double mult = gaussian_tail_multiplier(d0);
    int exceed = 0;
    for (double v : z)
      if (v > mult) ++exceed;
    const double freq = static_cast<double>(exceed) / draws;
    const double cap = d0 + 0.01;
    std::ostringstream name;
    name << "tails/gaussian delta0=" << d0;
    report.rows.push_back({name.str(), freq, cap, freq <= cap});
  }

  for (int n : {5, 20}) {
    Rng crng(derive_seed(seed, "tails-chi2", n));
    std::vector<double> x(draws);
    for (double& v : x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        const double g = crng.normal();
        s += g * g;
      }
      v = s / n;  // X/(v n) with v = 1
    }
    for (double b : {0.05, 0.2}) {
      const double cap = std::exp(-b * n) + 0.01;
      int up = 0, lo = 0;
      const double up_mult = chi_square_upper_multiplier(b);
      const double lo_mult = chi_square_lower_multiplier(b);
      for (double v : x) {
        if (v >= up_mult) ++up;
        if (v <= lo_mult) ++lo;
      }
      std::ostringstream base;
      base << " n=" << n << " b=" << b;
      const double fu = static_cast<double>(up) / draws;
      const double fl = static_cast<double>(lo) / draws;
      report.rows.push_back({"tails/chi2-upper" + base.str(), fu, cap, fu <= cap});
      report.rows.push_back({"tails/chi2-lower" + base.str(), fl, cap, fl <= cap});
    }
  }
  return report;
}

ValidationReport validate_theorem_bound(const std::vector<double>& observed_regrets,
                                        const BoundInputs& inputs, const std::string& label) {
  if (observed_regrets.empty()) throw std::invalid_argument("no observed regrets");
  const double bound = regret_bound_ucb(inputs);
  int covered = 0;
  for (double r : observed_regrets)
    if (r <= bound) ++covered;
  const double freq = static_cast<double>(covered) / observed_regrets.size();
  const double need = 1.0 - inputs.delta - 0.02;

  ValidationReport report;
  report.rows.push_back({"bounds/" + label + "-value (diagnostic)", bound, kInf, true});
  report.rows.push_back({"bounds/" + label + "-coverage", freq, need, freq >= need});
  return report;
}

ValidationReport validate_bounds_default(std::uint64_t seed, int trials) {
  ExperimentConfig cfg;
  cfg.setting = Setting::Discrete;
  cfg.m = 300;
  cfg.n = 200;
  cfg.t_steps = 20;
  cfg.delta = 0.1;
  cfg.trials = trials;
  cfg.methods = {Method::PemboUcb};
  cfg.seed = seed;

  const OfflineDataset data = generate_offline_dataset(cfg);
  ValidationReport report;
  for (double delta : {0.1, 0.5}) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.delta = delta;
    const ExperimentResult result = run_experiment(run_cfg, data);
    BoundInputs inputs;
    inputs.n = run_cfg.n;
    inputs.t_max = run_cfg.t_steps;
    inputs.delta = delta;
    inputs.c = run_cfg.kernel.signal_var;
    inputs.noise_sd = run_cfg.noise_sd;
    inputs.rho_t = experiment_rho(data, run_cfg);
    std::ostringstream label;
    label << "ucb-delta-" << delta;
    report.append(
        validate_theorem_bound(final_regrets(result, Method::PemboUcb), inputs, label.str()));
  }
  return report;
}

}  // namespace metabo
