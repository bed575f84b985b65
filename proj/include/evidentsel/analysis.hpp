#pragma once

#include <utility>
#include <vector>

#include "evidentsel/spectral.hpp"
#include "evidentsel/types.hpp"

namespace evsel {

/// Diagnostics of the denoising fixed-point map
///   f(lambda) = lambda * (|| |L|^2 B u_hat ||^2 / || |L| B u_hat ||^2)
///             * (trace B / trace(|L|^2 B)),   B = (I + lambda |L|^2)^-1,
/// whose iterates are exactly the lambda updates of the diagonal algorithm
/// when A = I. All operations expect a denoise-kind SpectralModel.

/// One application of the map; O(n) diagonal sums.
double fixpoint_f(const SpectralModel& model, const CVec& u_hat, double lambda);

/// f'(0) = n ||T^T T u||^2 / (sum |gamma_j|^2 * ||T u||^2); zero is a stable
/// fixed point exactly when this slope is below one.
double fixpoint_slope_at_zero(const SpectralModel& model, const CVec& u_hat);

struct KappaResult {
  double kappa = 0.0;  // f(lambda) ~ kappa * lambda^2 as lambda -> inf
  double lower = 0.0;
  double upper = 0.0;
};

/// Quadratic-growth constant with its attainable bounds
/// (min/max of |gamma|^2 over nonzero modes, scaled by the null count).
KappaResult kappa_infinity(const SpectralModel& model, const CVec& u_hat);

struct FixedPoint {
  double lambda = 0.0;
  bool stable = false;
  double slope = 0.0;  // |f'| estimate at the fixed point
};

struct FixedPointReport {
  std::vector<FixedPoint> fixed_points;  // lambda = 0 always included
  double slope_at_zero = 0.0;
  double kappa_inf = 0.0;
  std::pair<double, double> kappa_bounds{0.0, 0.0};
  std::vector<std::pair<double, double>> scan;  // (lambda, f(lambda))
  bool identity_regularizer = false;  // T = (scaled) identity: every lambda fixed
};

struct ScanOptions {
  double lambda_min = 1e-6;
  double lambda_max = 0.0;  // 0 -> 10 / kappa_inf
  int points = 400;
};

/// Locates sign changes of f(lambda) - lambda on a log grid, bisects each
/// to 1e-6 relative, and classifies stability from a central-difference
/// slope estimate.
FixedPointReport scan_fixed_points(const SpectralModel& model, const CVec& u_hat,
                                   const ScanOptions& opts = {});

}  // namespace evsel
