#include "metabo/acquisition.hpp"

#include <cmath>
#include <stdexcept>

namespace metabo {

void AcquisitionConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta outside (0,1)");
  if (kind == AcquisitionKind::Pi && !f_star_hat)
    throw std::invalid_argument("PI requires f_star_hat");
}

double ucb_zeta(int n, int t, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta outside (0,1)");
  if (t < 1) throw std::invalid_argument("ucb_zeta: t must be >= 1");
  const double l6 = std::log(6.0 / delta);
  const double l3 = std::log(3.0 / delta);
  if (n - t <= 0) throw std::runtime_error("N too small for (t, delta)");
  const double den = 1.0 - 2.0 * std::sqrt(l6 / (n - t));
  if (den <= 0.0) throw std::runtime_error("N too small for (t, delta)");
  const double iota = std::sqrt(6.0 * (n - 3.0 + t + 2.0 * std::sqrt(t * l6) + 2.0 * l6) /
                                (delta * n * (n - t - 1.0)));
  return (iota + std::sqrt(2.0 * l3)) / std::sqrt(den);
}

double score(AcquisitionKind kind, double mean_hat, double var_hat, double zeta_or_fstar) {
  if (var_hat < 0.0) throw std::invalid_argument("score: negative variance");
  if (kind == AcquisitionKind::Ucb) return mean_hat + zeta_or_fstar * std::sqrt(var_hat);
  return (mean_hat - zeta_or_fstar) / std::sqrt(std::max(var_hat, 1e-12));
}

int select_next(const Vector& scores, const std::vector<int>& queried) {
  const int m = static_cast<int>(scores.size());
  std::vector<bool> taken(m, false);
  for (int q : queried)
    if (q >= 0 && q < m) taken[q] = true;

  int best = -1;
  for (int i = 0; i < m; ++i) {
    if (taken[i]) continue;
    if (best < 0 || scores[i] > scores[best]) best = i;
  }
  if (best < 0) throw std::runtime_error("candidate set exhausted");
  return best;
}

}  // namespace metabo
