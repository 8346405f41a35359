#pragma once

#include <optional>
#include <vector>

#include "metabo/linalg.hpp"

namespace metabo {

enum class AcquisitionKind { Ucb, Pi };

/// Acquisition settings for one BO run. `fixed_zeta` replaces the ucb_zeta
/// schedule in oracle mode, where the prior is exact and the schedule's
/// estimation terms do not apply.
struct AcquisitionConfig {
  AcquisitionKind kind = AcquisitionKind::Ucb;
  double delta = 0.1;
  std::optional<double> f_star_hat;
  int n_train = 0;
  std::optional<double> fixed_zeta;

  void validate() const;
};

/// GP-UCB exploration coefficient for iteration t (1-based):
///   zeta_t = (iota + sqrt(2 log(3/d))) / sqrt(1 - 2 sqrt(log(6/d)/(N-t)))
/// with iota = sqrt(6(N-3+t+2 sqrt(t log(6/d))+2 log(6/d)) / (d N (N-t-1))).
/// Requires N - t > 4 log(6/delta).
double ucb_zeta(int n, int t, double delta);

/// UCB: mean + zeta sqrt(var). PI: (mean - f_star)/sqrt(var) with the
/// variance floored at 1e-12.
double score(AcquisitionKind kind, double mean_hat, double var_hat, double zeta_or_fstar);

/// Argmax over unqueried candidates, ties broken by lowest index.
int select_next(const Vector& scores, const std::vector<int>& queried);

}  // namespace metabo
