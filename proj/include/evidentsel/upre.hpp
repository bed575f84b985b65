#pragma once

#include <functional>

#include "evidentsel/evidence.hpp"
#include "evidentsel/spectral.hpp"
#include "evidentsel/types.hpp"

namespace evsel {

struct UPREGrid {
  double lambda_min = 1e-4;
  double lambda_max = 1e4;
  int coarse_count = 20;
  int refine_count = 20;
};

/// UPRE objective -m sigma^2 + ||A u_lambda - b||^2 + 2 sigma^2 trace(A B_lambda),
/// with trace(A B_lambda) = trace(H^-1 A^T A), evaluated diagonally.
double upre_objective_spectral(const SpectralModel& model, const CVec& b_hat, double lambda,
                               double sigma_sq);

/// Same objective for general operators: Tikhonov solve by CG, trace by
/// corrected Hutchinson estimation (probe solves warm-start across calls).
double upre_objective_general(const LinearOperator& A, const LinearOperator& T, const Vec& b,
                              double lambda, double sigma_sq, ProbeWork& work,
                              const CGConfig& cfg);

struct UPRESelection {
  double lambda = 0.0;
  double objective = 0.0;
  bool boundary = false;  // coarse winner sat on a grid endpoint
};

/// Coarse log-grid argmin, then a second log-spaced refinement spanning one
/// coarse step either side of the winner.
UPRESelection upre_select(const std::function<double(double)>& objective, const UPREGrid& grid);

UPRESelection upre_select_spectral(const SpectralModel& model, const Vec& b, double sigma_sq,
                                   const UPREGrid& grid);
UPRESelection upre_select_spectral_hat(const SpectralModel& model, const CVec& b_hat,
                                       double sigma_sq, const UPREGrid& grid);

UPRESelection upre_select_general(const LinearOperator& A, const LinearOperator& T, const Vec& b,
                                  double sigma_sq, const UPREGrid& grid, int probe_count,
                                  std::uint64_t seed, const CGConfig& cfg);

}  // namespace evsel
