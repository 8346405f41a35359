// Acceptance gate: runs every criterion at its pinned configuration and
// tolerance and prints one pass/fail line per criterion. Exit code is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "metabo/io.hpp"
#include "metabo/validate.hpp"
#include "oracle/formula_oracle.hpp"

using namespace metabo;

namespace {

struct Gate {
  int failures = 0;

  void report(int id, const std::string& desc, bool pass, const std::string& detail,
              double seconds) {
    std::printf("[%s] criterion %2d: %s (%s; %.1fs)\n", pass ? "PASS" : "FAIL", id, desc.c_str(),
                detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++failures;
  }
};

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

bool rows_pass(const ValidationReport& report, const std::string& prefix, std::string& detail) {
  bool ok = true;
  double worst = 0.0;
  std::string worst_name;
  for (const CheckRow& row : report.rows) {
    if (row.check.rfind(prefix, 0) != 0) continue;
    if (!row.pass) {
      ok = false;
      worst = row.statistic;
      worst_name = row.check;
    }
  }
  if (!ok) {
    detail = "failed " + worst_name + " statistic=" + format_double(worst);
  }
  return ok;
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

int main() {
  Gate gate;
  const std::uint64_t kSeed = 20250811;

  // ---- criteria 1-3: discrete estimator fixture --------------------------
  {
    const double start = now_seconds();
    Lemma1Config cfg;
    cfg.m = 10;
    cfg.n = 40;
    cfg.t = 3;
    cfg.noise_sd = 0.1;
    cfg.kernel = {0.3, 1.0};
    cfg.replications = 5000;
    cfg.ks_replications = 2000;
    cfg.deltas = {0.1, 0.3};
    cfg.seed = kSeed;
    const ValidationReport rep = validate_lemma1(cfg);
    const double elapsed = now_seconds() - start;

    std::string detail = "max |z| within 4 MC standard errors";
    bool pass = rows_pass(rep, "lemma1/bias", detail) && elapsed < 120.0;
    gate.report(1, "discrete estimator unbiasedness", pass, detail, elapsed);

    detail = "all six concentration events above 1-delta-0.02";
    pass = rows_pass(rep, "lemma1/coverage", detail);
    gate.report(2, "concentration coverage, delta in {0.1, 0.3}", pass, detail, elapsed);

    detail = "KS accepts chi-squared(36) at level 0.01 at 3 probes";
    pass = rows_pass(rep, "lemma1/ks", detail);
    gate.report(3, "scaled posterior-variance marginal is chi-squared", pass, detail, elapsed);
  }

  // ---- criterion 4: continuous estimator fixture -------------------------
  {
    const double start = now_seconds();
    Lemma3Config cfg;
    cfg.k = 5;
    cfg.m = 50;
    cfg.n = 60;
    cfg.t = 3;
    cfg.probes = 5;
    cfg.replications = 5000;
    cfg.seed = kSeed;
    const ValidationReport rep = validate_lemma3(cfg);
    const double elapsed = now_seconds() - start;
    std::string detail = "predict() means within 4 MC standard errors at 5 probes";
    const bool pass = rows_pass(rep, "lemma3/bias", detail) &&
                      rows_pass(rep, "lemma3/coverage", detail) && elapsed < 120.0;
    gate.report(4, "continuous estimator unbiasedness", pass, detail, elapsed);
  }

  // ---- criterion 5: closed forms vs extended-precision oracle ------------
  {
    const double start = now_seconds();
    const double anchor_delta = 6.0 / std::exp(2.0);
    int points = 0;
    double worst = 0.0;
    auto track = [&](double value, long double reference) {
      const double rel =
          std::abs(value - static_cast<double>(reference)) /
          std::max(1.0, std::abs(static_cast<double>(reference)));
      worst = std::max(worst, rel);
      ++points;
    };

    for (double delta : {anchor_delta, 0.1, 0.3})
      for (int n : {27, 50, 100, 1000})
        for (int t : {1, 2, 4, 8}) {
          if (n - t <= 4.0 * std::log(6.0 / delta)) continue;
          track(ucb_zeta(n, t, delta), formula_oracle::ucb_zeta(n, t, delta));
        }
    const double conc_delta = 4.0 / std::exp(2.0);
    for (double delta : {conc_delta, 0.1, 0.5})
      for (int n : {12, 40, 200})
        for (int t : {0, 2, 5}) {
          if (n <= t + 3) continue;
          const ConcentrationConstants c = concentration_constants(n, t, delta);
          track(c.a_t, formula_oracle::lemma_a(n, t, delta));
          track(c.b_t, formula_oracle::lemma_b(n, t, delta));
        }
    for (double delta : {0.1, 0.3})
      for (int n : {100, 400})
        for (double rho : {0.0, 20.0, 60.0}) {
          BoundInputs in;
          in.n = n;
          in.t_max = 20;
          in.delta = delta;
          in.c = 1.0;
          in.noise_sd = 0.1;
          in.rho_t = rho;
          in.f_star_hat = 2.0;
          in.mu_ref = 0.4;
          in.k_ref = 0.5;
          track(regret_bound_ucb(in),
                formula_oracle::bound_ucb(n, 20, delta, 1.0, 0.1, rho));
          track(regret_bound_pi(in), formula_oracle::bound_pi(n, 20, delta, 1.0, 0.1, rho,
                                                              2.0, 0.4, 0.5));
        }

    const double z1 = ucb_zeta(100, 1, anchor_delta);
    const double z2 = ucb_zeta(27, 4, anchor_delta);
    const bool anchors_ok = std::abs(z1 - 2.2433) <= 1e-3 && std::abs(z2 - 3.593) <= 1e-3;
    const bool pass = points >= 50 && worst <= 1e-12 && anchors_ok;
    gate.report(5, "schedule and bound formulas match the high-precision oracle", pass,
                std::to_string(points) + " points, worst rel err " + fmt(worst) +
                    ", anchors " + fmt(z1) + "/" + fmt(z2),
                now_seconds() - start);
  }

  // ---- criterion 6: inferred-argmax gap ----------------------------------
  {
    const double start = now_seconds();
    Lemma4Config cfg;
    cfg.runs = 2000;
    cfg.noise_sd = 0.1;
    cfg.delta = 0.1;
    cfg.seed = kSeed;
    const ValidationReport rep = validate_lemma4(cfg);
    const double freq = rep.rows.at(0).statistic;
    gate.report(6, "simple-regret gap bound holds in 2000 runs", freq >= 0.88,
                "frequency " + fmt(freq) + " >= 0.88", now_seconds() - start);
  }

  // ---- criteria 7 and 9: discrete benchmark, bound coverage, missing data -
  {
    const double start = now_seconds();
    ExperimentConfig cfg;
    cfg.setting = Setting::Discrete;
    cfg.m = 300;
    cfg.n = 200;
    cfg.t_steps = 20;
    cfg.d = 2;
    cfg.noise_sd = 0.1;
    cfg.kernel = {0.3, 1.0};
    cfg.trials = 40;
    cfg.delta = 0.1;
    cfg.methods = {Method::PemboUcb};
    cfg.seed = kSeed;

    const OfflineDataset data = generate_offline_dataset(cfg);
    const ExperimentResult full = run_experiment(cfg, data);
    const std::vector<double> full_final = final_regrets(full, Method::PemboUcb);

    BoundInputs inputs;
    inputs.n = cfg.n;
    inputs.t_max = cfg.t_steps;
    inputs.delta = cfg.delta;
    inputs.c = cfg.kernel.signal_var;
    inputs.noise_sd = cfg.noise_sd;
    inputs.rho_t = experiment_rho(data, cfg);
    const double bound = regret_bound_ucb(inputs);
    int covered = 0;
    for (double r : full_final)
      if (r <= bound) ++covered;
    const double freq = static_cast<double>(covered) / full_final.size();
    gate.report(7, "explicit bound covers the observed best-sample regret", freq >= 0.88,
                "coverage " + fmt(freq) + " >= 0.88 at bound " + fmt(bound),
                now_seconds() - start);

    const double start9 = now_seconds();
    ExperimentConfig masked_cfg = cfg;
    masked_cfg.mask_rate = 0.4;
    const ExperimentResult masked = run_experiment(masked_cfg);
    const std::vector<double> masked_final = final_regrets(masked, Method::PemboUcb);

    auto mean_se = [](const std::vector<double>& v) {
      double m = 0.0;
      for (double x : v) m += x;
      m /= v.size();
      double var = 0.0;
      for (double x : v) var += (x - m) * (x - m);
      const double se = std::sqrt(var / (v.size() - 1.0) / v.size());
      return std::pair<double, double>(m, se);
    };
    const auto [m_full, se_full] = mean_se(full_final);
    const auto [m_masked, se_masked] = mean_se(masked_final);
    const double tol = 2.0 * std::max(se_full, se_masked);
    const bool pass = std::abs(m_full - m_masked) <= tol;
    gate.report(9, "40% masking with completion matches the unmasked run", pass,
                "means " + fmt(m_full) + " vs " + fmt(m_masked) + ", 2se " + fmt(tol),
                now_seconds() - start9);
  }

  // ---- criterion 8: continuous benchmark reproduction --------------------
  {
    const double start = now_seconds();
    ExperimentConfig cfg;
    cfg.setting = Setting::Continuous;
    cfg.m = 300;
    cfg.n = 100;
    cfg.t_steps = 50;
    cfg.d = 2;
    cfg.k = 100;
    cfg.noise_sd = 0.1;
    cfg.kernel = {0.3, 1.0};
    cfg.trials = 40;
    cfg.delta = 0.1;
    cfg.methods = {Method::PemboUcb, Method::OracleUcb, Method::Random};
    cfg.seed = kSeed;

    const ExperimentResult result = run_experiment(cfg);
    auto mean_of = [&](Method m) {
      const std::vector<double> v = final_regrets(result, m);
      double s = 0.0;
      for (double x : v) s += x;
      return s / v.size();
    };
    const double pembo = mean_of(Method::PemboUcb);
    const double oracle = mean_of(Method::OracleUcb);
    const double random = mean_of(Method::Random);
    const bool pass_b = (pembo - oracle <= 0.15) && (pembo <= 0.7 * random);

    // Learning-curve sweep. A 10% fraction must still satisfy the schedule
    // precondition N_used >= 4 log(6/delta) + T + 2, so the sweep uses its
    // own N=300 task pool (0.1 * 300 = 30 >= 28.4 at T=10).
    ExperimentConfig lc = cfg;
    lc.n = 300;
    lc.t_steps = 10;
    lc.methods = {Method::PemboUcb};
    const OfflineDataset pool = generate_offline_dataset(lc);
    std::vector<double> fractions{0.1, 0.25, 0.5, 1.0};
    std::vector<double> means, ses;
    for (double frac : fractions) {
      ExperimentConfig sub = lc;
      sub.train_fraction = frac;
      const ExperimentResult res = run_experiment(sub, pool);
      double m = 0.0, var = 0.0;
      std::vector<double> ybest;
      for (const TrialRow& row : res.rows)
        if (row.t == sub.t_steps) ybest.push_back(row.y_best);
      for (double v : ybest) m += v;
      m /= ybest.size();
      for (double v : ybest) var += (v - m) * (v - m);
      means.push_back(m);
      ses.push_back(std::sqrt(var / (ybest.size() - 1.0) / ybest.size()));
    }
    bool monotone = true;
    for (std::size_t i = 1; i < means.size(); ++i)
      if (means[i] < means[i - 1] - ses[i - 1]) monotone = false;
    const bool pass_a =
        std::abs(means.front() - means.back()) <= std::max(ses.front(), ses.back()) && monotone;

    const double elapsed = now_seconds() - start;
    gate.report(8, "synthetic-benchmark reproduction", pass_a && pass_b && elapsed < 600.0,
                "rT pembo/oracle/random " + fmt(pembo) + "/" + fmt(oracle) + "/" + fmt(random) +
                    "; ybest@10pct " + fmt(means.front()) + " vs " + fmt(means.back()) +
                    " (se " + fmt(std::max(ses.front(), ses.back())) + ")",
                elapsed);
  }

  // ---- criterion 10: exact-inference oracle equivalence ------------------
  {
    const double start = now_seconds();
    Rng rng(kSeed);
    double worst_exact = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      const int m = 3 + rng.uniform_int(18);
      Matrix inputs(m, 1);
      for (int i = 0; i < m; ++i) inputs(i, 0) = rng.uniform();
      GpPrior prior;
      prior.mean = Vector::Zero(m);
      for (int i = 0; i < m; ++i) prior.mean[i] = rng.normal();
      prior.cov = se_kernel_matrix(inputs, inputs, {0.4, 1.0});
      prior.noise_sd = 0.05 + 0.5 * rng.uniform();

      const int t = 1 + rng.uniform_int(std::min(10, m));
      History h;
      for (int i = 0; i < t; ++i) {
        h.indices.push_back(rng.uniform_int(m));
        h.observations.push_back(rng.normal());
      }
      const ExactPosterior post = exact_posterior(prior, h);

      Matrix kqq(t, t);
      Matrix kxq(m, t);
      Vector resid(t);
      for (int i = 0; i < t; ++i) {
        for (int j = 0; j < t; ++j) kqq(i, j) = prior.cov(h.indices[i], h.indices[j]);
        kxq.col(i) = prior.cov.col(h.indices[i]);
        resid[i] = h.observations[i] - prior.mean[h.indices[i]];
      }
      kqq.diagonal().array() += prior.noise_sd * prior.noise_sd;
      const Matrix inv = kqq.inverse();
      worst_exact = std::max(worst_exact,
                             (post.mean_t - (prior.mean + kxq * inv * resid)).cwiseAbs().maxCoeff());
      worst_exact = std::max(
          worst_exact,
          (post.cov_t - (prior.cov - kxq * inv * kxq.transpose())).cwiseAbs().maxCoeff());
    }

    // Discrete and continuous estimator paths on the identified model.
    double worst_paths = 0.0;
    {
      const int k = 9, m = 8, n = 14;
      const FeatureMap map = make_cosine_features(1, k, 0.5, kSeed + 1);
      Matrix grid(m, 1);
      for (int i = 0; i < m; ++i) grid(i, 0) = rng.uniform();
      const Matrix phi = map.features(grid);
      Matrix weights(n, k);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) weights(i, j) = rng.normal();
      const ContinuousPriorEstimate cont = estimate_prior_continuous(weights, phi, map);
      DiscretePriorEstimate disc;
      disc.mean_hat = phi.transpose() * cont.u_hat;
      disc.cov_hat = symmetrize(phi.transpose() * cont.sigma_hat * phi);
      disc.n_train = n;

      History h;
      h.indices = {0, 3, 6};
      h.observations = {0.4, -0.9, 1.3};
      const PosteriorEstimate dpost = estimate_posterior_discrete(disc, h);
      Matrix phi_t(k, 3);
      for (int i = 0; i < 3; ++i) phi_t.col(i) = phi.col(h.indices[i]);
      Vector ys(3);
      ys << 0.4, -0.9, 1.3;
      const ContinuousPosterior cpost = estimate_posterior_continuous(cont, phi_t, ys);
      for (int j = 0; j < m; ++j) {
        const Prediction p = predict(cpost, Vector(grid.row(j).transpose()));
        worst_paths = std::max(worst_paths, std::abs(p.mean_hat - dpost.mean_hat_t[j]));
        worst_paths = std::max(worst_paths, std::abs(p.var_raw - dpost.var_hat_t[j]));
      }
    }

    const bool pass = worst_exact <= 1e-10 && worst_paths <= 1e-8;
    gate.report(10, "exact-inference and estimator-path equivalences", pass,
                "posterior max err " + fmt(worst_exact) + ", path max err " + fmt(worst_paths),
                now_seconds() - start);
  }

  std::printf("%d criterion(s) failed\n", gate.failures);
  return gate.failures;
}
