#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "metabo/bench.hpp"
#include "metabo/completion.hpp"
#include "metabo/io.hpp"
#include "metabo/stats.hpp"
#include "metabo/validate.hpp"

namespace py = pybind11;
using namespace metabo;

namespace {

AcquisitionKind parse_kind(const std::string& kind) {
  if (kind == "ucb") return AcquisitionKind::Ucb;
  if (kind == "pi") return AcquisitionKind::Pi;
  throw std::invalid_argument("unknown acquisition kind: " + kind);
}

OfflineMatrix make_offline(const Matrix& values,
                           const std::optional<Matrix>& mask) {
  OfflineMatrix data;
  data.values = values;
  if (mask) {
    data.mask = mask->unaryExpr([](double v) { return v != 0.0; }).cast<bool>();
  } else {
    data.mask.setConstant(values.rows(), values.cols(), true);
  }
  return data;
}

History make_history(const std::vector<int>& indices, const std::vector<double>& ys) {
  History h;
  h.indices = indices;
  h.observations = ys;
  return h;
}

}  // namespace

PYBIND11_MODULE(_metabo, m) {
  m.doc() = "meta Bayesian optimization with an estimated Gaussian-process prior";

  // acquisition schedules and selection
  m.def("ucb_zeta", &ucb_zeta, py::arg("n"), py::arg("t"), py::arg("delta"));
  m.def(
      "concentration_constants",
      [](int n, int t, double delta) {
        const ConcentrationConstants c = concentration_constants(n, t, delta);
        return py::make_tuple(c.a_t, c.b_t);
      },
      py::arg("n"), py::arg("t"), py::arg("delta"));
  m.def(
      "score",
      [](const std::string& kind, double mean, double var, double zeta_or_fstar) {
        return score(parse_kind(kind), mean, var, zeta_or_fstar);
      },
      py::arg("kind"), py::arg("mean_hat"), py::arg("var_hat"), py::arg("zeta_or_fstar"));
  m.def(
      "select_next",
      [](const Vector& scores, const std::vector<int>& queried) {
        return select_next(scores, queried);
      },
      py::arg("scores"), py::arg("queried") = std::vector<int>{});

  // exact GP machinery
  m.def(
      "sample_function",
      [](const Vector& mean, const Matrix& cov, double noise_sd, std::uint64_t seed) {
        return sample_function({mean, cov, noise_sd}, seed);
      },
      py::arg("mean"), py::arg("cov"), py::arg("noise_sd"), py::arg("seed"));
  m.def(
      "exact_posterior",
      [](const Vector& mean, const Matrix& cov, double noise_sd,
         const std::vector<int>& indices, const std::vector<double>& ys) {
        const ExactPosterior post =
            exact_posterior({mean, cov, noise_sd}, make_history(indices, ys));
        return py::make_tuple(post.mean_t, post.cov_t);
      },
      py::arg("mean"), py::arg("cov"), py::arg("noise_sd"), py::arg("indices"), py::arg("ys"));

  // discrete estimators
  m.def(
      "estimate_prior_discrete",
      [](const Matrix& values) {
        const DiscretePriorEstimate est = estimate_prior_discrete(make_offline(values, {}));
        return py::make_tuple(est.mean_hat, est.cov_hat);
      },
      py::arg("values"));
  m.def(
      "estimate_posterior_discrete",
      [](const Vector& mean_hat, const Matrix& cov_hat, int n_train,
         const std::vector<int>& indices, const std::vector<double>& ys) {
        DiscretePriorEstimate prior{mean_hat, cov_hat, n_train};
        const PosteriorEstimate post =
            estimate_posterior_discrete(prior, make_history(indices, ys));
        return py::make_tuple(post.mean_hat_t, post.var_hat_t);
      },
      py::arg("mean_hat"), py::arg("cov_hat"), py::arg("n_train"), py::arg("indices"),
      py::arg("ys"));

  // completion
  m.def(
      "complete_matrix",
      [](const Matrix& values, const Matrix& mask, int max_rank, double shrink, int max_iters,
         double tol) {
        const OfflineMatrix out =
            complete_matrix(make_offline(values, mask), {max_rank, shrink, max_iters, tol});
        return out.values;
      },
      py::arg("values"), py::arg("mask"), py::arg("max_rank"), py::arg("shrink") = 0.0,
      py::arg("max_iters") = 200, py::arg("tol") = 1e-9);

  // continuous estimators
  py::class_<FeatureMap>(m, "FeatureMap")
      .def_readonly("frequencies", &FeatureMap::frequencies)
      .def_readonly("phases", &FeatureMap::phases)
      .def_readonly("scale", &FeatureMap::scale)
      .def("__call__", [](const FeatureMap& f, const Vector& x) { return f(x); })
      .def("features", [](const FeatureMap& f, const Matrix& x) { return f.features(x); });
  py::class_<ContinuousPriorEstimate>(m, "ContinuousPriorEstimate")
      .def_readonly("u_hat", &ContinuousPriorEstimate::u_hat)
      .def_readonly("sigma_hat", &ContinuousPriorEstimate::sigma_hat)
      .def_readonly("n_train", &ContinuousPriorEstimate::n_train)
      .def_readonly("design_gram_inverse", &ContinuousPriorEstimate::design_gram_inverse);
  py::class_<ContinuousPosterior>(m, "ContinuousPosterior")
      .def_readonly("u_hat_t", &ContinuousPosterior::u_hat_t)
      .def_readonly("sigma_hat_t", &ContinuousPosterior::sigma_hat_t)
      .def_readonly("t", &ContinuousPosterior::t);

  m.def("make_cosine_features", &make_cosine_features, py::arg("d"), py::arg("k"),
        py::arg("bandwidth"), py::arg("seed"));
  m.def("fit_task_weights", &fit_task_weights, py::arg("design"), py::arg("ys"));
  m.def("fit_task_weights_all", &fit_task_weights_all, py::arg("design"), py::arg("ys_tasks"));
  m.def("estimate_prior_continuous", &estimate_prior_continuous, py::arg("weights"),
        py::arg("design"), py::arg("features"));
  m.def(
      "estimate_posterior_continuous",
      [](const ContinuousPriorEstimate& prior, const Matrix& phi_t, const Vector& ys) {
        return estimate_posterior_continuous(prior, phi_t, ys);
      },
      py::arg("prior"), py::arg("phi_t"), py::arg("ys"));
  m.def(
      "predict",
      [](const ContinuousPriorEstimate& prior, const Vector& x) {
        const Prediction p = predict(prior, x);
        return py::make_tuple(p.mean_hat, p.var_hat);
      },
      py::arg("prior"), py::arg("x"));
  m.def(
      "predict",
      [](const ContinuousPosterior& post, const Vector& x) {
        const Prediction p = predict(post, x);
        return py::make_tuple(p.mean_hat, p.var_hat);
      },
      py::arg("posterior"), py::arg("x"));
  m.def(
      "bar_sigma_sq",
      [](const ContinuousPriorEstimate& prior, double noise_sd, const Vector& x) {
        return bar_sigma_sq(prior, noise_sd, x);
      },
      py::arg("prior"), py::arg("noise_sd"), py::arg("x"));

  // information gain and bounds
  m.def("info_gain", &info_gain, py::arg("cov"), py::arg("noise_sd"));
  m.def("greedy_max_info_gain", &greedy_max_info_gain, py::arg("cov"), py::arg("noise_sd"),
        py::arg("t_steps"));
  m.def(
      "regret_bound_ucb",
      [](int n, int t_max, double delta, double c, double noise_sd, double rho_t) {
        BoundInputs in;
        in.n = n;
        in.t_max = t_max;
        in.delta = delta;
        in.c = c;
        in.noise_sd = noise_sd;
        in.rho_t = rho_t;
        return regret_bound_ucb(in);
      },
      py::arg("n"), py::arg("t_max"), py::arg("delta"), py::arg("c"), py::arg("noise_sd"),
      py::arg("rho_t"));
  m.def(
      "regret_bound_pi",
      [](int n, int t_max, double delta, double c, double noise_sd, double rho_t,
         double f_star_hat, double mu_ref, double k_ref) {
        BoundInputs in;
        in.n = n;
        in.t_max = t_max;
        in.delta = delta;
        in.c = c;
        in.noise_sd = noise_sd;
        in.rho_t = rho_t;
        in.f_star_hat = f_star_hat;
        in.mu_ref = mu_ref;
        in.k_ref = k_ref;
        return regret_bound_pi(in);
      },
      py::arg("n"), py::arg("t_max"), py::arg("delta"), py::arg("c"), py::arg("noise_sd"),
      py::arg("rho_t"), py::arg("f_star_hat"), py::arg("mu_ref"), py::arg("k_ref"));

  // experiment harness
  m.def(
      "run_experiment",
      [](const std::string& setting, int m_, int n, int t, int d, int k, double noise_sd,
         double mask_rate, double lengthscale, double signal_var, int trials, double delta,
         const std::vector<std::string>& methods, std::uint64_t seed, double train_fraction,
         int jobs) {
        ExperimentConfig cfg;
        cfg.setting = setting == "continuous" ? Setting::Continuous : Setting::Discrete;
        cfg.m = m_;
        cfg.n = n;
        cfg.t_steps = t;
        cfg.d = d;
        cfg.k = k;
        cfg.noise_sd = noise_sd;
        cfg.mask_rate = mask_rate;
        cfg.kernel = {lengthscale, signal_var};
        cfg.trials = trials;
        cfg.delta = delta;
        cfg.methods.clear();
        for (const std::string& name : methods) cfg.methods.push_back(parse_method(name));
        cfg.seed = seed;
        cfg.train_fraction = train_fraction;
        cfg.jobs = jobs;
        const ExperimentResult result = run_experiment(cfg);
        py::list rows;
        for (const AggregateRow& row : result.aggregate) {
          py::dict item;
          item["method"] = method_name(row.method);
          item["t"] = row.t;
          item["mean_r"] = row.mean_r;
          item["se_r"] = row.se_r;
          item["mean_R"] = row.mean_big_r;
          item["se_R"] = row.se_big_r;
          item["mean_ybest"] = row.mean_ybest;
          item["se_ybest"] = row.se_ybest;
        rows.append(item);
        }
        return rows;
      },
      py::arg("setting") = "discrete", py::arg("m") = 60, py::arg("n") = 60, py::arg("t") = 10,
      py::arg("d") = 1, py::arg("k") = 20, py::arg("noise_sd") = 0.1, py::arg("mask_rate") = 0.0,
      py::arg("lengthscale") = 0.3, py::arg("signal_var") = 1.0, py::arg("trials") = 4,
      py::arg("delta") = 0.1,
      py::arg("methods") = std::vector<std::string>{"pembo-ucb", "random"}, py::arg("seed") = 0,
      py::arg("train_fraction") = 1.0, py::arg("jobs") = 0);
}
