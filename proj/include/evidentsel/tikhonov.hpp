#pragma once

#include <optional>

#include "evidentsel/operators.hpp"
#include "evidentsel/types.hpp"

namespace evsel {

struct CGConfig {
  double rel_tol = 1e-8;
  int max_iter = 0;  // 0 -> 2n
  std::optional<Vec> warm_start;
};

struct SolveResult {
  Vec u;
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
};

/// Minimizes ||A u - b||^2 + lambda ||T u||^2 by conjugate gradients on the
/// normal equations H u = A^T b with H = A^T A + lambda T^T T; H is never
/// materialized. Non-convergence within max_iter flags the result rather
/// than throwing.
SolveResult solve_cg(const LinearOperator& A, const LinearOperator& T, const Vec& b,
                     double lambda, const CGConfig& cfg = {});

struct BlockSolveResult {
  Mat X;
  int iterations = 0;
  bool all_converged = false;
};

/// Same system, many right-hand sides in lockstep; the dominant cost
/// becomes blocked A^T A applies. X0, when given, warm-starts the solves.
BlockSolveResult solve_cg_block(const LinearOperator& A, const LinearOperator& T, const Mat& B,
                                double lambda, const CGConfig& cfg = {},
                                const Mat* X0 = nullptr);

}  // namespace evsel
