#pragma once

#include <Eigen/Dense>

namespace metabo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Diagonal jitter schedule shared by every SPD solve in the library:
/// nothing on the first attempt, then 1e-8*trace/m escalating tenfold per
/// failure up to 1e-2*trace/m.
struct JitterPolicy {
  double initial_rel = 1e-8;
  double max_rel = 1e-2;
};

/// Cholesky factorization with the shared jitter schedule. Throws
/// std::runtime_error once the jitter budget is exhausted.
class SpdFactor {
 public:
  explicit SpdFactor(const Matrix& a, const JitterPolicy& policy = {});

  Vector solve(const Vector& b) const { return llt_.solve(b); }
  Matrix solve(const Matrix& b) const { return llt_.solve(b); }
  double log_det() const;
  double jitter() const { return jitter_; }

 private:
  Eigen::LLT<Matrix> llt_;
  double jitter_ = 0.0;
};

/// PSD slack used by the type invariants: 1e-8 * trace / m (0 for an empty
/// or zero-trace matrix).
double psd_tolerance(const Matrix& a);

bool is_symmetric(const Matrix& a, double tol = 1e-9);

/// Smallest eigenvalue of the symmetrized matrix.
double min_eigenvalue(const Matrix& a);

inline Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace metabo
