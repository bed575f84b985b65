#pragma once

#include <vector>

#include "evidentsel/operators.hpp"
#include "evidentsel/spectral.hpp"
#include "evidentsel/tikhonov.hpp"
#include "evidentsel/types.hpp"

namespace evsel {

/// Laplacian-prior parameter from the recovered Gaussian-prior pair:
/// lambda_1 = 2^{3/2} sigma^2 / eta. Note eta, not eta^2.
double map_to_l1(double sigma_sq, double eta);

/// Elementwise soft threshold sign(v) * max(|v| - t, 0).
Vec shrink(const Vec& v, double threshold);

struct ADMMConfig {
  double rho = 0.0;  // 0 -> lambda_1 (or 1 when lambda_1 == 0)
  double abs_tol = 1e-6;
  double rel_tol = 1e-4;
  int max_iter = 2000;
  CGConfig inner_cg;
};

struct L1Result {
  Vec u;
  Vec z;  // split variable T u at exit (exactly sparse)
  Vec w;  // scaled dual; rho * w approximates lambda_1 * subgradient(||z||_1)
  std::vector<double> primal_residual;
  std::vector<double> dual_residual;
  int iterations = 0;
  bool converged = false;
  double rho = 0.0;
};

/// Minimizes ||A u - b||^2 + lambda_1 ||T u||_1 by ADMM on the splitting
/// z = T u: quadratic u-update (2 A^T A + rho T^T T) u = 2 A^T b + rho T^T (z - w),
/// soft-threshold z-update, scaled dual ascent on w.
L1Result solve_l1_admm(const LinearOperator& A, const LinearOperator& T, const Vec& b,
                       double lambda_1, const ADMMConfig& cfg = {});

/// Same iteration with the u-update done diagonally in the DFT domain;
/// valid for denoising/deconvolution models (not Fourier masks).
L1Result solve_l1_admm_spectral(const SpectralModel& model, const Vec& b, double lambda_1,
                                const ADMMConfig& cfg = {});

}  // namespace evsel
