#pragma once

// Test-only reference evaluations of the closed-form constants and bounds,
// transcribed directly in extended precision and kept independent of the
// library implementations.

#include <cmath>

namespace formula_oracle {

inline long double ucb_zeta(long double n, long double t, long double delta) {
  const long double l6 = std::log(6.0L / delta);
  const long double l3 = std::log(3.0L / delta);
  const long double num =
      std::sqrt(6.0L * (n - 3.0L + t + 2.0L * std::sqrt(t * l6) + 2.0L * l6) /
                (delta * n * (n - t - 1.0L))) +
      std::sqrt(2.0L * l3);
  return num / std::sqrt(1.0L - 2.0L * std::sqrt(l6 / (n - t)));
}

inline long double lemma_a(long double n, long double t, long double delta) {
  const long double l4 = std::log(4.0L / delta);
  return 4.0L * (n - 2.0L + t + 2.0L * std::sqrt(t * l4) + 2.0L * l4) /
         (delta * n * (n - t - 2.0L));
}

inline long double lemma_b(long double n, long double t, long double delta) {
  return std::log(4.0L / delta) / (n - t - 1.0L);
}

inline long double thm_iota(long double n, long double t, long double delta) {
  const long double l6 = std::log(6.0L / delta);
  return std::sqrt(6.0L * (n - 3.0L + t + 2.0L * std::sqrt(t * l6) + 2.0L * l6) /
                   (delta * n * (n - t - 1.0L)));
}

inline long double thm_b(long double n, long double t, long double delta) {
  return std::log(6.0L / delta) / (n - t);
}

inline long double lambda(long double c, long double rho, long double t, long double sigma) {
  return std::sqrt(2.0L * c * rho / (t * std::log(1.0L + c / (sigma * sigma))) +
                   sigma * sigma);
}

inline long double bound_ucb(long double n, long double t, long double delta, long double c,
                             long double sigma, long double rho) {
  const long double iota = thm_iota(n, t, delta);
  const long double b = thm_b(n, t, delta);
  const long double zp = std::sqrt(2.0L * std::log(3.0L / delta));
  const long double eta =
      (iota + zp) / std::sqrt(1.0L - 2.0L * std::sqrt(b)) *
          std::sqrt(1.0L + 2.0L * std::sqrt(b) + 2.0L * b) +
      iota + zp;
  return eta * lambda(c, rho, t, sigma) -
         zp * sigma * sigma / std::sqrt(c + sigma * sigma);
}

inline long double bound_pi(long double n, long double t, long double delta, long double c,
                            long double sigma, long double rho, long double f_star,
                            long double mu_ref, long double k_ref) {
  const long double iota = thm_iota(n, t, delta);
  const long double b = thm_b(n, t, delta);
  const long double zp = std::sqrt(2.0L * std::log(3.0L / (2.0L * delta)));
  const long double ratio = (f_star - mu_ref) / std::sqrt(k_ref + sigma * sigma);
  const long double eta =
      (ratio + iota) *
          std::sqrt((1.0L + 2.0L * std::sqrt(b) + 2.0L * b) / (1.0L - 2.0L * std::sqrt(b))) +
      iota + zp;
  return eta * lambda(c, rho, t, sigma) -
         zp * sigma * sigma / (2.0L * std::sqrt(c + sigma * sigma));
}

}  // namespace formula_oracle
