#include "evidentsel/upre.hpp"

#include <cmath>
#include <vector>

namespace evsel {

namespace {

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g(static_cast<std::size_t>(count));
  const double step = (std::log(hi) - std::log(lo)) / (count - 1);
  for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + i * step);
  return g;
}

}  // namespace

double upre_objective_spectral(const SpectralModel& model, const CVec& b_hat, double lambda,
                               double sigma_sq) {
  if (sigma_sq <= 0.0) throw std::invalid_argument("upre: sigma^2 must be > 0");
  const SpectralNorms norms = spectral_solution_norms(model, b_hat, lambda);
  const SpectralTraces traces = spectral_traces(model, lambda);
  const double m = static_cast<double>(model.m);
  return -m * sigma_sq + norms.data_misfit + 2.0 * sigma_sq * traces.trace_a;
}

double upre_objective_general(const LinearOperator& A, const LinearOperator& T, const Vec& b,
                              double lambda, double sigma_sq, ProbeWork& work,
                              const CGConfig& cfg) {
  if (sigma_sq <= 0.0) throw std::invalid_argument("upre: sigma^2 must be > 0");
  const SolveResult solve = solve_cg(A, T, b, lambda, cfg);
  const double misfit = (A.apply(solve.u) - b).squaredNorm();
  const TraceEstimate raw = hutchinson_traces(A, T, lambda, work, cfg);
  const CorrectedTraces corrected = correct_traces(raw.trace_a, raw.trace_t, lambda, A.cols());
  const double trace_a = corrected.ok ? corrected.trace_a : raw.trace_a;
  const double m = static_cast<double>(A.rows());
  return -m * sigma_sq + misfit + 2.0 * sigma_sq * trace_a;
}

UPRESelection upre_select(const std::function<double(double)>& objective, const UPREGrid& grid) {
  if (!(grid.lambda_min > 0.0) || !(grid.lambda_min < grid.lambda_max))
    throw std::invalid_argument("upre grid: need 0 < lambda_min < lambda_max");
  if (grid.coarse_count < 2 || grid.refine_count < 2)
    throw std::invalid_argument("upre grid: counts must be >= 2");

  const std::vector<double> coarse = log_grid(grid.lambda_min, grid.lambda_max, grid.coarse_count);
  int best = 0;
  double best_val = objective(coarse[0]);
  for (int i = 1; i < grid.coarse_count; ++i) {
    const double v = objective(coarse[static_cast<std::size_t>(i)]);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }

  UPRESelection sel;
  sel.lambda = coarse[static_cast<std::size_t>(best)];
  sel.objective = best_val;
  sel.boundary = (best == 0 || best == grid.coarse_count - 1);

  const double lo = best > 0 ? coarse[static_cast<std::size_t>(best - 1)] : coarse[0];
  const double hi = best < grid.coarse_count - 1 ? coarse[static_cast<std::size_t>(best + 1)]
                                                 : coarse[static_cast<std::size_t>(best)];
  if (lo < hi) {
    for (double lam : log_grid(lo, hi, grid.refine_count)) {
      const double v = objective(lam);
      if (v < sel.objective) {
        sel.objective = v;
        sel.lambda = lam;
      }
    }
  }
  return sel;
}

UPRESelection upre_select_spectral_hat(const SpectralModel& model, const CVec& b_hat,
                                       double sigma_sq, const UPREGrid& grid) {
  return upre_select(
      [&](double lam) { return upre_objective_spectral(model, b_hat, lam, sigma_sq); }, grid);
}

UPRESelection upre_select_spectral(const SpectralModel& model, const Vec& b, double sigma_sq,
                                   const UPREGrid& grid) {
  return upre_select_spectral_hat(model, spectral_data_transform(model, b), sigma_sq, grid);
}

UPRESelection upre_select_general(const LinearOperator& A, const LinearOperator& T, const Vec& b,
                                  double sigma_sq, const UPREGrid& grid, int probe_count,
                                  std::uint64_t seed, const CGConfig& cfg) {
  const ProbeSet probes = ProbeSet::make(A.cols(), probe_count, seed);
  ProbeWork work = ProbeWork::prepare(A, T, probes);
  return upre_select(
      [&](double lam) { return upre_objective_general(A, T, b, lam, sigma_sq, work, cfg); },
      grid);
}

}  // namespace evsel
