#include "evidentsel/tikhonov.hpp"

#include <cmath>

namespace evsel {

namespace {

Vec apply_normal(const LinearOperator& A, const LinearOperator& T, double lambda, const Vec& x) {
  Vec hx = A.apply_gram(x);
  if (lambda != 0.0) hx.noalias() += lambda * T.apply_gram(x);
  return hx;
}

Mat apply_normal_block(const LinearOperator& A, const LinearOperator& T, double lambda,
                       const Mat& X) {
  Mat hx = A.apply_gram_block(X);
  if (lambda != 0.0) hx.noalias() += lambda * T.apply_gram_block(X);
  return hx;
}

}  // namespace

SolveResult solve_cg(const LinearOperator& A, const LinearOperator& T, const Vec& b,
                     double lambda, const CGConfig& cfg) {
  if (lambda < 0.0) throw std::invalid_argument("solve_cg: lambda must be >= 0");
  const Index n = A.cols();
  const Vec rhs = A.apply_adjoint(b);
  const double rhs_norm = rhs.norm();
  const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : static_cast<int>(2 * n);

  SolveResult result;
  result.u = cfg.warm_start ? *cfg.warm_start : Vec::Zero(n);

  if (rhs_norm == 0.0) {
    result.u = Vec::Zero(n);
    result.converged = true;
    return result;
  }

  Vec r = rhs - apply_normal(A, T, lambda, result.u);
  Vec p = r;
  double rs = r.squaredNorm();
  const double stop = cfg.rel_tol * rhs_norm;

  int k = 0;
  while (std::sqrt(rs) > stop && k < max_iter) {
    const Vec hp = apply_normal(A, T, lambda, p);
    const double php = p.dot(hp);
    if (php <= 0.0) break;  // H numerically singular along p
    const double alpha = rs / php;
    result.u += alpha * p;
    r -= alpha * hp;
    const double rs_next = r.squaredNorm();
    p = r + (rs_next / rs) * p;
    rs = rs_next;
    ++k;
  }
  result.iterations = k;
  result.final_residual = std::sqrt(rs);
  result.converged = result.final_residual <= stop;
  return result;
}

BlockSolveResult solve_cg_block(const LinearOperator& A, const LinearOperator& T, const Mat& B,
                                double lambda, const CGConfig& cfg, const Mat* X0) {
  if (lambda < 0.0) throw std::invalid_argument("solve_cg_block: lambda must be >= 0");
  const Index n = A.cols();
  const Index ncols = B.cols();
  const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : static_cast<int>(2 * n);

  BlockSolveResult result;
  result.X = X0 ? *X0 : Mat::Zero(n, ncols);

  Mat R = B - apply_normal_block(A, T, lambda, result.X);
  Mat P = R;
  Vec rs(ncols), stop(ncols);
  std::vector<bool> active(static_cast<std::size_t>(ncols), true);
  Index n_active = 0;
  for (Index j = 0; j < ncols; ++j) {
    rs[j] = R.col(j).squaredNorm();
    stop[j] = cfg.rel_tol * B.col(j).norm();
    if (std::sqrt(rs[j]) <= stop[j]) {
      active[static_cast<std::size_t>(j)] = false;
      P.col(j).setZero();
    } else {
      ++n_active;
    }
  }

  int k = 0;
  while (n_active > 0 && k < max_iter) {
    const Mat HP = apply_normal_block(A, T, lambda, P);
    for (Index j = 0; j < ncols; ++j) {
      if (!active[static_cast<std::size_t>(j)]) continue;
      const double php = P.col(j).dot(HP.col(j));
      if (php <= 0.0) {
        active[static_cast<std::size_t>(j)] = false;
        P.col(j).setZero();
        --n_active;
        continue;
      }
      const double alpha = rs[j] / php;
      result.X.col(j) += alpha * P.col(j);
      R.col(j) -= alpha * HP.col(j);
      const double rs_next = R.col(j).squaredNorm();
      P.col(j) = R.col(j) + (rs_next / rs[j]) * P.col(j);
      rs[j] = rs_next;
      if (std::sqrt(rs[j]) <= stop[j]) {
        active[static_cast<std::size_t>(j)] = false;
        P.col(j).setZero();
        --n_active;
      }
    }
    ++k;
  }

  result.iterations = k;
  result.all_converged = true;
  for (Index j = 0; j < ncols; ++j)
    if (std::sqrt(rs[j]) > stop[j]) result.all_converged = false;
  return result;
}

}  // namespace evsel
