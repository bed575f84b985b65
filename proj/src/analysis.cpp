#include "evidentsel/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace evsel {

namespace {

void require_denoise(const SpectralModel& model, const CVec& u_hat) {
  if (model.kind != SpectralKind::Denoise)
    throw std::invalid_argument("fixed-point analysis: denoise-kind model required");
  if (u_hat.size() != model.n_total)
    throw std::invalid_argument("fixed-point analysis: u_hat length mismatch");
}

bool constant_reg_spectrum(const Vec& t) {
  const double lo = t.minCoeff();
  const double hi = t.maxCoeff();
  return hi - lo <= 1e-12 * std::max(hi, 1.0);
}

}  // namespace

double fixpoint_f(const SpectralModel& model, const CVec& u_hat, double lambda) {
  require_denoise(model, u_hat);
  if (lambda < 0.0) throw std::invalid_argument("fixpoint_f: lambda must be >= 0");
  double num_norm = 0.0, den_norm = 0.0, num_tr = 0.0, den_tr = 0.0;
  for (Index j = 0; j < model.n_total; ++j) {
    const double t = model.reg_eigs_sq[j];
    const double beta = 1.0 / (1.0 + lambda * t);
    const double u2 = std::norm(u_hat[j]);
    const double tb2u = t * beta * beta * u2;
    num_norm += t * tb2u;
    den_norm += tb2u;
    num_tr += beta;
    den_tr += t * beta;
  }
  if (den_norm == 0.0 || den_tr == 0.0)
    throw std::domain_error("fixpoint_f: data supported on the regularizer null space");
  return lambda * (num_norm / den_norm) * (num_tr / den_tr);
}

double fixpoint_slope_at_zero(const SpectralModel& model, const CVec& u_hat) {
  require_denoise(model, u_hat);
  double ttu = 0.0, tu = 0.0, tsum = 0.0;
  for (Index j = 0; j < model.n_total; ++j) {
    const double t = model.reg_eigs_sq[j];
    const double u2 = std::norm(u_hat[j]);
    ttu += t * t * u2;
    tu += t * u2;
    tsum += t;
  }
  if (tu == 0.0)
    throw std::domain_error("fixpoint slope: data supported on the regularizer null space");
  return static_cast<double>(model.n_total) * ttu / (tsum * tu);
}

KappaResult kappa_infinity(const SpectralModel& model, const CVec& u_hat) {
  require_denoise(model, u_hat);
  const Index n = model.n_total;
  double num = 0.0, den = 0.0;
  double t_min = 0.0, t_max = 0.0;
  Index null_count = 0;
  for (Index j = 0; j < n; ++j) {
    const double t = model.reg_eigs_sq[j];
    if (t <= 0.0) {
      ++null_count;
      continue;
    }
    if (t_min == 0.0 || t < t_min) t_min = t;
    if (t > t_max) t_max = t;
    const double u2 = std::norm(u_hat[j]);
    num += u2;
    den += u2 / t;
  }
  if (null_count == 0)
    throw std::invalid_argument("kappa_infinity: regularizer has no null direction (need r >= 1)");
  if (den == 0.0)
    throw std::domain_error("kappa_infinity: no spectral content outside the null space");
  const double scale = static_cast<double>(null_count) / static_cast<double>(n - null_count);
  KappaResult out;
  out.kappa = scale * num / den;
  out.lower = scale * t_min;
  out.upper = scale * t_max;
  return out;
}

FixedPointReport scan_fixed_points(const SpectralModel& model, const CVec& u_hat,
                                   const ScanOptions& opts) {
  require_denoise(model, u_hat);
  FixedPointReport report;

  if (constant_reg_spectrum(model.reg_eigs_sq)) {
    // f(lambda) = lambda identically; every value is fixed.
    report.identity_regularizer = true;
    return report;
  }

  report.slope_at_zero = fixpoint_slope_at_zero(model, u_hat);
  const KappaResult kappa = kappa_infinity(model, u_hat);
  report.kappa_inf = kappa.kappa;
  report.kappa_bounds = {kappa.lower, kappa.upper};

  FixedPoint zero;
  zero.lambda = 0.0;
  zero.slope = report.slope_at_zero;
  zero.stable = report.slope_at_zero < 1.0;
  report.fixed_points.push_back(zero);

  const double lo = opts.lambda_min;
  const double hi = opts.lambda_max > 0.0 ? opts.lambda_max : 10.0 / kappa.kappa;
  if (!(lo > 0.0) || !(lo < hi) || opts.points < 2)
    throw std::invalid_argument("scan_fixed_points: bad scan range");

  auto gap = [&](double lam) { return fixpoint_f(model, u_hat, lam) - lam; };

  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / (opts.points - 1);
  report.scan.reserve(static_cast<std::size_t>(opts.points));
  double prev_lambda = 0.0, prev_gap = 0.0;
  for (int i = 0; i < opts.points; ++i) {
    const double lam = std::exp(log_lo + i * step);
    const double f_val = fixpoint_f(model, u_hat, lam);
    report.scan.emplace_back(lam, f_val);
    const double g = f_val - lam;

    if (i > 0 && ((prev_gap < 0.0 && g > 0.0) || (prev_gap > 0.0 && g < 0.0))) {
      double a = prev_lambda, b = lam, ga = prev_gap;
      while ((b - a) > 1e-6 * (0.5 * (a + b))) {
        const double mid = std::sqrt(a * b);
        const double gm = gap(mid);
        if (gm == 0.0) {
          a = b = mid;
          break;
        }
        if ((ga < 0.0) == (gm < 0.0)) {
          a = mid;
          ga = gm;
        } else {
          b = mid;
        }
      }
      FixedPoint fp;
      fp.lambda = 0.5 * (a + b);
      const double h = 1e-4 * fp.lambda;
      fp.slope = (fixpoint_f(model, u_hat, fp.lambda + h) -
                  fixpoint_f(model, u_hat, fp.lambda - h)) /
                 (2.0 * h);
      fp.stable = std::abs(fp.slope) < 1.0;
      report.fixed_points.push_back(fp);
    }
    prev_lambda = lam;
    prev_gap = g;
  }
  return report;
}

}  // namespace evsel
