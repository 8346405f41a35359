#include "metabo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace metabo {

namespace {

double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  // Lentz's algorithm on the standard continued fraction for Q(a, x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("regularized_gamma_p: a <= 0");
  if (x < 0.0) throw std::invalid_argument("regularized_gamma_p: x < 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double chi2_cdf(double x, double k) {
  if (k <= 0.0) throw std::invalid_argument("chi2_cdf: k <= 0");
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * k, 0.5 * x);
}

double gaussian_tail_multiplier(double delta0) {
  if (!(delta0 > 0.0 && delta0 < 0.5))
    throw std::invalid_argument("gaussian_tail_multiplier: delta0 outside (0, 1/2)");
  return std::sqrt(2.0 * std::log(1.0 / (2.0 * delta0)));
}

double chi_square_upper_multiplier(double b) {
  if (b < 0.0) throw std::invalid_argument("negative b");
  return 1.0 + 2.0 * std::sqrt(b) + 2.0 * b;
}

double chi_square_lower_multiplier(double b) {
  if (b < 0.0) throw std::invalid_argument("negative b");
  return 1.0 - 2.0 * std::sqrt(b);
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                 double level) {
  if (samples.size() < 2) throw std::invalid_argument("ks_test: too few samples");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("ks_test: bad level");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, (i + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  // Asymptotic Kolmogorov quantile (first term of the series) with Stephens'
  // finite-n correction.
  const double k_alpha = std::sqrt(-0.5 * std::log(level / 2.0));
  KsResult res;
  res.statistic = d;
  res.critical = k_alpha / (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));
  res.accept = d <= res.critical;
  return res;
}

double info_gain(const Matrix& cov, double noise_sd) {
  if (!(noise_sd > 0.0)) throw std::invalid_argument("info_gain: noise_sd must be positive");
  const int t = static_cast<int>(cov.rows());
  if (t == 0) return 0.0;
  Matrix a = cov / (noise_sd * noise_sd);
  a.diagonal().array() += 1.0;
  return 0.5 * SpdFactor(a).log_det();
}

double greedy_max_info_gain(const Matrix& cov, double noise_sd, int t_steps) {
  if (!(noise_sd > 0.0)) throw std::invalid_argument("greedy_max_info_gain: noise_sd must be positive");
  const int m = static_cast<int>(cov.rows());
  if (t_steps > m) throw std::invalid_argument("greedy_max_info_gain: T exceeds candidates");
  Matrix post = cov;
  const double s2 = noise_sd * noise_sd;
  double total = 0.0;
  for (int t = 0; t < t_steps; ++t) {
    int j = 0;
    for (int i = 1; i < m; ++i)
      if (post(i, i) > post(j, j)) j = i;
    const double v = std::max(post(j, j), 0.0);
    total += 0.5 * std::log1p(v / s2);
    const Vector col = post.col(j);
    post -= col * col.transpose() / (v + s2);
  }
  return total;
}

void BoundInputs::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta outside (0,1)");
  if (c < 0.0) throw std::invalid_argument("negative kernel bound c");
  if (rho_t < 0.0) throw std::invalid_argument("negative rho_T");
  if (!(noise_sd > 0.0)) throw std::invalid_argument("noise_sd must be positive");
  if (t_max < 1) throw std::invalid_argument("t_max must be >= 1");
  if (static_cast<double>(n) < 4.0 * std::log(6.0 / delta) + t_max + 2.0)
    throw std::runtime_error("training set too small for the bound");
}

double bound_iota(int n, int t, double delta) {
  const double l6 = std::log(6.0 / delta);
  return std::sqrt(6.0 * (n - 3.0 + t + 2.0 * std::sqrt(t * l6) + 2.0 * l6) /
                   (delta * n * (n - t - 1.0)));
}

double bound_b(int n, int t, double delta) {
  return std::log(6.0 / delta) / (static_cast<double>(n) - t);
}

namespace {

double lambda_term(const BoundInputs& in) {
  const double s2 = in.noise_sd * in.noise_sd;
  return std::sqrt(2.0 * in.c * in.rho_t / (in.t_max * std::log1p(in.c / s2)) + s2);
}

}  // namespace

double regret_bound_ucb(const BoundInputs& in) {
  in.validate();
  const double iota = bound_iota(in.n, in.t_max, in.delta);
  const double b = bound_b(in.n, in.t_max, in.delta);
  const double zp = std::sqrt(2.0 * std::log(3.0 / in.delta));
  const double eta = (iota + zp) / std::sqrt(1.0 - 2.0 * std::sqrt(b)) *
                         std::sqrt(1.0 + 2.0 * std::sqrt(b) + 2.0 * b) +
                     iota + zp;
  const double s2 = in.noise_sd * in.noise_sd;
  return eta * lambda_term(in) - zp * s2 / std::sqrt(in.c + s2);
}

double regret_bound_pi(const BoundInputs& in) {
  in.validate();
  const double iota = bound_iota(in.n, in.t_max, in.delta);
  const double b = bound_b(in.n, in.t_max, in.delta);
  const double zp = std::sqrt(2.0 * std::log(3.0 / (2.0 * in.delta)));
  const double s2 = in.noise_sd * in.noise_sd;
  const double ratio = (in.f_star_hat - in.mu_ref) / std::sqrt(in.k_ref + s2);
  const double eta = (ratio + iota) * std::sqrt((1.0 + 2.0 * std::sqrt(b) + 2.0 * b) /
                                                (1.0 - 2.0 * std::sqrt(b))) +
                     iota + zp;
  return eta * lambda_term(in) - zp * s2 / (2.0 * std::sqrt(in.c + s2));
}

}  // namespace metabo
