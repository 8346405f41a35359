#include "metabo/completion.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace metabo {

void CompletionConfig::validate() const {
  if (max_rank < 1) throw std::invalid_argument("completion: max_rank < 1");
  if (shrink < 0.0) throw std::invalid_argument("completion: negative shrink");
  if (max_iters < 1) throw std::invalid_argument("completion: max_iters < 1");
  if (tol <= 0.0) throw std::invalid_argument("completion: tol <= 0");
}

namespace {

double masked_objective(const OfflineMatrix& data, const Matrix& x, double shrink) {
  double err = 0.0;
  for (int i = 0; i < data.n_tasks(); ++i)
    for (int j = 0; j < data.n_inputs(); ++j)
      if (data.mask(i, j)) {
        const double d = data.values(i, j) - x(i, j);
        err += d * d;
      }
  double nuclear = 0.0;
  if (shrink > 0.0) {
    Eigen::BDCSVD<Matrix> svd(x);
    nuclear = svd.singularValues().sum();
  }
  return 0.5 * err + shrink * nuclear;
}

}  // namespace

OfflineMatrix complete_matrix(const OfflineMatrix& data, const CompletionConfig& cfg,
                              CompletionStats* stats) {
  data.validate();
  cfg.validate();
  if (data.complete()) {
    if (stats) *stats = {};
    OfflineMatrix out = data;
    out.mask.setConstant(data.n_tasks(), data.n_inputs(), true);
    return out;
  }

  const int n = data.n_tasks();
  const int m = data.n_inputs();
  for (int i = 0; i < n; ++i)
    if (!data.mask.row(i).any()) throw std::invalid_argument("unrecoverable row/column");
  for (int j = 0; j < m; ++j)
    if (!data.mask.col(j).any()) throw std::invalid_argument("unrecoverable row/column");

  const long observed = data.mask.count();
  const double needed = cfg.max_rank * std::pow(static_cast<double>(n), 1.2) *
                        std::log(std::max(2.0, static_cast<double>(n)));
  if (static_cast<double>(observed) < needed)
    std::cerr << "complete_matrix: observed entries (" << observed
              << ") below the rank-" << cfg.max_rank
              << " sample-complexity heuristic (" << static_cast<long>(needed)
              << "); completion quality is not guaranteed\n";

  Matrix filled = Matrix::Zero(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (data.mask(i, j)) filled(i, j) = data.values(i, j);

  if (stats) *stats = {};
  int iters = 0;
  for (; iters < cfg.max_iters; ++iters) {
    Matrix work = filled;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        if (data.mask(i, j)) work(i, j) = data.values(i, j);

    Eigen::BDCSVD<Matrix> svd(work, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector s = (svd.singularValues().array() - cfg.shrink).max(0.0);
    int rank = 0;
    for (int i = 0; i < s.size() && i < cfg.max_rank; ++i)
      if (s[i] > 0.0) ++rank;
    Matrix next = svd.matrixU().leftCols(rank) * s.head(rank).asDiagonal() *
                  svd.matrixV().leftCols(rank).transpose();

    if (stats) stats->objective.push_back(masked_objective(data, next, cfg.shrink));

    const double delta = (next - filled).squaredNorm();
    const double base = std::max(filled.squaredNorm(), 1e-300);
    filled = std::move(next);
    if (delta <= cfg.tol * base) {
      ++iters;
      break;
    }
  }
  if (stats) stats->iterations = iters;

  OfflineMatrix out;
  out.noise_sd_hint = data.noise_sd_hint;
  out.values = filled;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (data.mask(i, j)) out.values(i, j) = data.values(i, j);
  out.mask.setConstant(n, m, true);
  return out;
}

}  // namespace metabo
