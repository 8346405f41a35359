#include "metabo/linalg.hpp"

#include <stdexcept>

namespace metabo {

SpdFactor::SpdFactor(const Matrix& a, const JitterPolicy& policy) {
  const Eigen::Index m = a.rows();
  if (a.cols() != m) throw std::invalid_argument("SpdFactor: matrix not square");
  if (!a.allFinite()) throw std::invalid_argument("SpdFactor: matrix has non-finite entries");

  const double scale = m > 0 ? std::max(a.trace() / static_cast<double>(m), 0.0) : 0.0;
  double jit = 0.0;
  for (int attempt = 0; attempt < 12; ++attempt) {
    if (jit == 0.0) {
      llt_.compute(a);
    } else {
      llt_.compute(Matrix(a + jit * Matrix::Identity(m, m)));
    }
    if (llt_.info() == Eigen::Success) {
      jitter_ = jit;
      return;
    }
    if (scale <= 0.0) break;
    jit = (jit == 0.0) ? policy.initial_rel * scale : jit * 10.0;
    if (jit > policy.max_rel * scale) break;
  }
  throw std::runtime_error("matrix not positive definite after jitter");
}

double SpdFactor::log_det() const {
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

double psd_tolerance(const Matrix& a) {
  const Eigen::Index m = a.rows();
  if (m == 0) return 0.0;
  return 1e-8 * std::max(a.trace(), 0.0) / static_cast<double>(m);
}

bool is_symmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  if (a.rows() == 0) return true;
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol * (1.0 + a.cwiseAbs().maxCoeff());
}

double min_eigenvalue(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace metabo
