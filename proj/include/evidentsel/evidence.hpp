#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "evidentsel/operators.hpp"
#include "evidentsel/spectral.hpp"
#include "evidentsel/tikhonov.hpp"
#include "evidentsel/types.hpp"

namespace evsel {

/// One iterate of the evidence-maximizing update; lambda = sigma_sq / eta_sq.
struct MEState {
  int k = 0;
  double sigma_sq = 0.0;
  double eta_sq = 0.0;
  double lambda = 0.0;
};

enum class StopReason { Tol, MaxIter, Divergence };

struct METrajectory {
  double lambda0 = 0.0;
  std::vector<MEState> states;          // updates 1..K
  std::vector<double> solution_change;  // relative change between successive solves
  bool converged = false;
  StopReason stop_reason = StopReason::MaxIter;
  bool cg_clean = true;  // general path: every inner CG solve converged

  const MEState& final_state() const { return states.back(); }
  double final_lambda() const { return states.empty() ? lambda0 : states.back().lambda; }
  double final_sigma() const;
  double final_eta() const;
  int iterations() const { return static_cast<int>(states.size()); }
};

/// Gaussian probe block for stochastic trace estimation. Columns are
/// orthonormalized, then rescaled to norm sqrt(n) so x^T x = n matches the
/// i.i.d. expectation and trace(I) estimates stay exact.
struct ProbeSet {
  int count = 0;
  std::uint64_t seed = 0;
  Mat probes;  // n x J

  static ProbeSet make(Index n, int count, std::uint64_t seed);
};

/// Per-run probe working set: Y = T^T T X and Z = A^T A X are computed once;
/// W carries the probe solves across outer iterations as warm starts.
struct ProbeWork {
  Mat X, Y, Z, W;

  static ProbeWork prepare(const LinearOperator& A, const LinearOperator& T,
                           const ProbeSet& probes);
};

struct TraceEstimate {
  double trace_a = 0.0;  // trace(H^-1 A^T A) estimate
  double trace_t = 0.0;  // trace(H^-1 T^T T) estimate
  bool cg_ok = true;
};

/// Hutchinson estimates (1/J) sum w_j . z_j and (1/J) sum w_j . y_j with
/// w_j = H^-1 x_j via conjugate gradients.
TraceEstimate hutchinson_traces(const LinearOperator& A, const LinearOperator& T, double lambda,
                                ProbeWork& work, const CGConfig& cfg);

struct CorrectedTraces {
  double trace_a = 0.0;
  double trace_t = 0.0;
  bool ok = true;
};

/// Projects raw estimates onto the identity
/// trace(H^-1 A^T A) + lambda trace(H^-1 T^T T) = n.
CorrectedTraces correct_traces(double trace_a, double trace_t, double lambda, Index n);

struct MEStepResult {
  MEState state;
  bool ok = true;
};

/// sigma^2 = misfit / (m - trace_a), eta^2 = regnorm / (n - lambda trace_t).
/// Nonpositive denominators, zero misfit, or zero regnorm flag the step.
MEStepResult me_step(double misfit, double regnorm, double trace_a, double trace_t,
                     double lambda, Index m, Index n, int k);

struct MEOptions {
  double lambda0 = 1.0;
  int max_iter = 30;
  double tol = 1e-4;
  int probe_count = 32;     // general path only
  std::uint64_t seed = 0;   // probe RNG
  CGConfig cg;

  // Declare divergence when lambda exceeds this multiple of max(lambda0, 1).
  double lambda_blowup = 1e6;
};

struct LinearProblem {
  OperatorPtr A;
  OperatorPtr T;
  Vec b;
  std::optional<Vec> truth;

  Index m() const { return A->rows(); }
  Index n() const { return A->cols(); }
};

/// General-operator path: CG solves plus Hutchinson traces with the exact
/// trace-identity correction, iterated to a fixed point of (sigma, eta).
METrajectory me_iterate_general(const LinearProblem& problem, const MEOptions& opts);

/// Returns the solve at the trajectory's final lambda (convenience).
SolveResult me_solve_final(const LinearProblem& problem, const METrajectory& traj,
                           const CGConfig& cfg = {});

struct SpectralMEResult {
  METrajectory trajectory;
  CVec u_hat;  // solution at the final lambda, DFT domain
  Vec u;       // spatial solution (one inverse transform)
};

/// Fast path for DFT-diagonalized problems: one forward transform up front,
/// O(n_total) diagonal arithmetic per iteration, one inverse transform at
/// the end. For masks, b_hat carries the data embedded at the mask indices.
SpectralMEResult me_iterate_spectral_hat(const SpectralModel& model, const CVec& b_hat,
                                         const MEOptions& opts);
SpectralMEResult me_iterate_spectral(const SpectralModel& model, const Vec& b,
                                     const MEOptions& opts);

}  // namespace evsel
