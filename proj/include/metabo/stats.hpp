#pragma once

#include <functional>
#include <vector>

#include "metabo/linalg.hpp"

namespace metabo {

/// Regularized lower incomplete gamma P(a, x); series for x < a+1, continued
/// fraction otherwise.
double regularized_gamma_p(double a, double x);

/// Chi-squared CDF with k degrees of freedom.
double chi2_cdf(double x, double k);

/// One-sided Gaussian tail multiplier: zeta_0 = sqrt(2 log(1/(2 delta_0))),
/// so that P(x - mu > zeta_0 sigma) <= delta_0.
double gaussian_tail_multiplier(double delta0);

/// Scalar-Wishart tail multipliers for X ~ W(v, n):
/// P(X/(vn) >= 1 + 2 sqrt(b) + 2b) <= exp(-bn), P(X/(vn) <= 1 - 2 sqrt(b)) <= exp(-bn).
double chi_square_upper_multiplier(double b);
double chi_square_lower_multiplier(double b);

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;
  bool accept = false;
};

/// One-sample Kolmogorov-Smirnov test against a given CDF. The critical
/// value uses the asymptotic Kolmogorov quantile with the usual finite-n
/// correction D (sqrt(n) + 0.12 + 0.11/sqrt(n)) <= K_alpha.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                 double level);

/// 1/2 log det(I + noise^-2 cov); the mutual information between the
/// function values at the queried set and their noisy observations.
double info_gain(const Matrix& cov, double noise_sd);

/// Greedy approximation of rho_T = max over size-T subsets of the info gain,
/// by repeatedly picking the candidate with the largest posterior variance.
double greedy_max_info_gain(const Matrix& cov, double noise_sd, int t_steps);

/// Inputs for the explicit regret-bound closed forms.
struct BoundInputs {
  int n = 0;
  int t_max = 0;
  double delta = 0.1;
  double c = 1.0;         // upper bound on max_x k(x)
  double noise_sd = 0.1;
  double rho_t = 0.0;
  double f_star_hat = 0.0;  // PI terms
  double mu_ref = 0.0;
  double k_ref = 0.0;

  void validate() const;  // requires n >= 4 log(6/delta) + t_max + 2
};

/// iota_{t-1} and b_{t-1} from the explicit bound (log(6/delta) flavor).
double bound_iota(int n, int t, double delta);
double bound_b(int n, int t, double delta);

/// Explicit best-sample simple-regret bound for the scheduled GP-UCB.
double regret_bound_ucb(const BoundInputs& inputs);

/// Explicit best-sample simple-regret bound for PI with target f_star_hat.
double regret_bound_pi(const BoundInputs& inputs);

}  // namespace metabo
