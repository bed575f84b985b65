#include "evidentsel/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evidentsel/rng.hpp"

namespace evsel {

double METrajectory::final_sigma() const {
  return states.empty() ? 0.0 : std::sqrt(states.back().sigma_sq);
}

double METrajectory::final_eta() const {
  return states.empty() ? 0.0 : std::sqrt(states.back().eta_sq);
}

ProbeSet ProbeSet::make(Index n, int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("probe set: count must be >= 1");
  if (static_cast<Index>(count) > n) count = static_cast<int>(n);
  Rng rng(seed);
  Mat gauss = gaussian_matrix(rng, n, count);
  Eigen::HouseholderQR<Mat> qr(gauss);
  Mat q = qr.householderQ() * Mat::Identity(n, count);
  q *= std::sqrt(static_cast<double>(n));
  ProbeSet set;
  set.count = count;
  set.seed = seed;
  set.probes = std::move(q);
  return set;
}

ProbeWork ProbeWork::prepare(const LinearOperator& A, const LinearOperator& T,
                             const ProbeSet& probes) {
  ProbeWork work;
  work.X = probes.probes;
  work.Y = T.apply_gram_block(work.X);
  work.Z = A.apply_gram_block(work.X);
  work.W = Mat::Zero(work.X.rows(), work.X.cols());
  return work;
}

TraceEstimate hutchinson_traces(const LinearOperator& A, const LinearOperator& T, double lambda,
                                ProbeWork& work, const CGConfig& cfg) {
  BlockSolveResult solves = solve_cg_block(A, T, work.X, lambda, cfg, &work.W);
  work.W = solves.X;
  const int count = static_cast<int>(work.X.cols());
  TraceEstimate est;
  est.cg_ok = solves.all_converged;
  for (int j = 0; j < count; ++j) {
    est.trace_a += work.W.col(j).dot(work.Z.col(j));
    est.trace_t += work.W.col(j).dot(work.Y.col(j));
  }
  est.trace_a /= count;
  est.trace_t /= count;
  return est;
}

CorrectedTraces correct_traces(double trace_a, double trace_t, double lambda, Index n) {
  CorrectedTraces out;
  const double s = trace_a + lambda * trace_t;
  if (!(s > 0.0)) {
    out.ok = false;
    return out;
  }
  const double scale = static_cast<double>(n) / s;
  out.trace_a = scale * trace_a;
  out.trace_t = scale * trace_t;
  return out;
}

MEStepResult me_step(double misfit, double regnorm, double trace_a, double trace_t,
                     double lambda, Index m, Index n, int k) {
  MEStepResult out;
  out.state.k = k;
  const double denom_sigma = static_cast<double>(m) - trace_a;
  const double denom_eta = static_cast<double>(n) - lambda * trace_t;
  if (!(denom_sigma > 0.0) || !(denom_eta > 0.0) || !(misfit > 0.0) || !(regnorm > 0.0)) {
    out.ok = false;
    out.state.sigma_sq = denom_sigma > 0.0 ? misfit / denom_sigma : 0.0;
    out.state.eta_sq = denom_eta > 0.0 ? regnorm / denom_eta : 0.0;
    out.state.lambda = 0.0;
    return out;
  }
  out.state.sigma_sq = misfit / denom_sigma;
  out.state.eta_sq = regnorm / denom_eta;
  out.state.lambda = out.state.sigma_sq / out.state.eta_sq;
  if (!std::isfinite(out.state.lambda) || out.state.lambda <= 0.0) out.ok = false;
  return out;
}

METrajectory me_iterate_general(const LinearProblem& problem, const MEOptions& opts) {
  if (opts.lambda0 <= 0.0) throw std::invalid_argument("me_iterate: lambda0 must be > 0");
  if (opts.max_iter < 1) throw std::invalid_argument("me_iterate: max_iter must be >= 1");
  const LinearOperator& A = *problem.A;
  const LinearOperator& T = *problem.T;
  const Index m = problem.m();
  const Index n = problem.n();

  METrajectory traj;
  traj.lambda0 = opts.lambda0;

  ProbeSet probes = ProbeSet::make(n, opts.probe_count, opts.seed);
  ProbeWork work = ProbeWork::prepare(A, T, probes);

  double lambda = opts.lambda0;
  Vec u_prev;
  CGConfig cg = opts.cg;

  for (int k = 1; k <= opts.max_iter; ++k) {
    SolveResult solve = solve_cg(A, T, problem.b, lambda, cg);
    if (!solve.converged) traj.cg_clean = false;

    bool tol_reached = false;
    if (u_prev.size()) {
      const double change = (solve.u - u_prev).norm() / u_prev.norm();
      traj.solution_change.push_back(change);
      tol_reached = change < opts.tol;
    }
    u_prev = solve.u;
    cg.warm_start = u_prev;

    TraceEstimate raw = hutchinson_traces(A, T, lambda, work, opts.cg);
    if (!raw.cg_ok) traj.cg_clean = false;
    CorrectedTraces corrected = correct_traces(raw.trace_a, raw.trace_t, lambda, n);
    if (!corrected.ok) {
      traj.stop_reason = StopReason::Divergence;
      break;
    }

    const double misfit = (A.apply(u_prev) - problem.b).squaredNorm();
    const double regnorm = T.apply(u_prev).squaredNorm();
    MEStepResult step =
        me_step(misfit, regnorm, corrected.trace_a, corrected.trace_t, lambda, m, n, k);
    if (!step.ok) {
      traj.stop_reason = StopReason::Divergence;
      break;
    }
    traj.states.push_back(step.state);
    const double lambda_prev = lambda;
    lambda = step.state.lambda;

    if (tol_reached) {
      // The solution stabilized; if lambda is still moving hard the map has
      // no interior fixed point here (zero-noise collapse or blowup).
      if (std::abs(lambda / lambda_prev - 1.0) > 0.5) {
        traj.stop_reason = StopReason::Divergence;
      } else {
        traj.converged = true;
        traj.stop_reason = StopReason::Tol;
      }
      break;
    }
    if (lambda > opts.lambda_blowup * std::max(opts.lambda0, 1.0) ||
        step.state.eta_sq < std::numeric_limits<double>::min()) {
      traj.stop_reason = StopReason::Divergence;
      break;
    }
  }
  if (!traj.converged && traj.stop_reason != StopReason::Divergence)
    traj.stop_reason = StopReason::MaxIter;
  return traj;
}

SolveResult me_solve_final(const LinearProblem& problem, const METrajectory& traj,
                           const CGConfig& cfg) {
  return solve_cg(*problem.A, *problem.T, problem.b, traj.final_lambda(), cfg);
}

namespace {

/// Fused per-iteration pass of the diagonal algorithm. Residual degrees of
/// freedom are accumulated summand-wise (see spectral_traces) so one step
/// here matches the analysis fixed-point map to roundoff for any lambda.
struct DiagonalPass {
  double misfit = 0.0;
  double regnorm = 0.0;
  double resid_a = 0.0;
  double resid_t = 0.0;
};

DiagonalPass diagonal_pass(const SpectralModel& model, const Vec& b_sq, double lambda) {
  DiagonalPass out;
  const bool masked = model.kind == SpectralKind::FourierMask;
  for (Index j = 0; j < model.n_total; ++j) {
    const double f = model.forward_eigs_sq[j];
    const double t = model.reg_eigs_sq[j];
    const double d = f + lambda * t;
    if (d <= 0.0) {
      out.misfit += b_sq[j];
      out.resid_t += 1.0;
      if (!masked) out.resid_a += 1.0;
      continue;
    }
    const double rfac = lambda * t / d;
    out.misfit += rfac * rfac * b_sq[j];
    out.regnorm += t * f * b_sq[j] / (d * d);
    if (!masked || f > 0.0) out.resid_a += rfac;
    out.resid_t += f / d;
  }
  return out;
}

double solution_change_between(const SpectralModel& model, const Vec& b_sq, double lambda_old,
                               double lambda_new) {
  double diff = 0.0;
  double base = 0.0;
  for (Index j = 0; j < model.n_total; ++j) {
    const double f = model.forward_eigs_sq[j];
    if (f == 0.0) continue;
    const double t = model.reg_eigs_sq[j];
    const double d_old = f + lambda_old * t;
    const double d_new = f + lambda_new * t;
    const double delta = (lambda_old - lambda_new) * t / (d_old * d_new);
    diff += f * delta * delta * b_sq[j];
    base += f * b_sq[j] / (d_old * d_old);
  }
  return base > 0.0 ? std::sqrt(diff / base) : 0.0;
}

}  // namespace

SpectralMEResult me_iterate_spectral_hat(const SpectralModel& model, const CVec& b_hat,
                                         const MEOptions& opts) {
  if (opts.lambda0 <= 0.0) throw std::invalid_argument("me_iterate: lambda0 must be > 0");
  if (opts.max_iter < 1) throw std::invalid_argument("me_iterate: max_iter must be >= 1");
  if (b_hat.size() != model.n_total)
    throw std::invalid_argument("me_iterate_spectral: b_hat length mismatch");

  const Vec b_sq = b_hat.cwiseAbs2();

  SpectralMEResult result;
  METrajectory& traj = result.trajectory;
  traj.lambda0 = opts.lambda0;

  double lambda = opts.lambda0;
  double lambda_prev_solve = -1.0;  // lambda of the previous iterate's solution

  for (int k = 1; k <= opts.max_iter; ++k) {
    bool tol_reached = false;
    if (lambda_prev_solve >= 0.0) {
      const double change = solution_change_between(model, b_sq, lambda_prev_solve, lambda);
      traj.solution_change.push_back(change);
      tol_reached = change < opts.tol;
    }
    lambda_prev_solve = lambda;

    const DiagonalPass pass = diagonal_pass(model, b_sq, lambda);
    if (!(pass.resid_a > 0.0) || !(pass.resid_t > 0.0) || !(pass.misfit > 0.0) ||
        !(pass.regnorm > 0.0)) {
      traj.stop_reason = StopReason::Divergence;
      break;
    }
    MEState state;
    state.k = k;
    state.sigma_sq = pass.misfit / pass.resid_a;
    state.eta_sq = pass.regnorm / pass.resid_t;
    state.lambda = state.sigma_sq / state.eta_sq;
    if (!std::isfinite(state.lambda) || state.lambda <= 0.0) {
      traj.stop_reason = StopReason::Divergence;
      break;
    }
    traj.states.push_back(state);
    const double lambda_prev = lambda;
    lambda = state.lambda;

    if (tol_reached) {
      if (std::abs(lambda / lambda_prev - 1.0) > 0.5) {
        traj.stop_reason = StopReason::Divergence;
      } else {
        traj.converged = true;
        traj.stop_reason = StopReason::Tol;
      }
      break;
    }
    if (lambda > opts.lambda_blowup * std::max(opts.lambda0, 1.0) ||
        state.eta_sq < std::numeric_limits<double>::min()) {
      traj.stop_reason = StopReason::Divergence;
      break;
    }
  }
  if (!traj.converged && traj.stop_reason != StopReason::Divergence)
    traj.stop_reason = StopReason::MaxIter;

  result.u_hat = spectral_solve(model, b_hat, traj.final_lambda());
  result.u = spectral_inverse_transform(model, result.u_hat);
  return result;
}

SpectralMEResult me_iterate_spectral(const SpectralModel& model, const Vec& b,
                                     const MEOptions& opts) {
  return me_iterate_spectral_hat(model, spectral_data_transform(model, b), opts);
}

}  // namespace evsel
