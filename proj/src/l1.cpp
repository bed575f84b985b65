#include "evidentsel/l1.hpp"

#include <cmath>

#include "evidentsel/dft.hpp"

namespace evsel {

double map_to_l1(double sigma_sq, double eta) {
  if (sigma_sq <= 0.0 || eta <= 0.0)
    throw std::invalid_argument("map_to_l1: sigma^2 and eta must be positive");
  return 2.0 * std::sqrt(2.0) * sigma_sq / eta;
}

Vec shrink(const Vec& v, double threshold) {
  Vec out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - threshold;
    out[i] = mag > 0.0 ? (v[i] > 0.0 ? mag : -mag) : 0.0;
  }
  return out;
}

namespace {

struct ResidualScales {
  double eps_pri;
  double eps_dual;
};

ResidualScales stopping_thresholds(const ADMMConfig& cfg, Index p, Index n, double norm_tu,
                                   double norm_z, double norm_rho_ttw) {
  ResidualScales s;
  s.eps_pri = std::sqrt(static_cast<double>(p)) * cfg.abs_tol +
              cfg.rel_tol * std::max(norm_tu, norm_z);
  s.eps_dual = std::sqrt(static_cast<double>(n)) * cfg.abs_tol + cfg.rel_tol * norm_rho_ttw;
  return s;
}

// CG for (A^T A + c T^T T) u = rhs with warm start; the ADMM u-update in
// half-weight form c = rho/2, rhs = A^T b + c T^T (z - w).
void quad_update(const LinearOperator& A, const LinearOperator& T, double c, const Vec& rhs,
                 Vec& u, const CGConfig& cfg) {
  const Index n = rhs.size();
  const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : static_cast<int>(2 * n);
  auto apply_h = [&](const Vec& x) -> Vec { return A.apply_gram(x) + c * T.apply_gram(x); };

  Vec r = rhs - apply_h(u);
  Vec p = r;
  double rs = r.squaredNorm();
  const double stop = cfg.rel_tol * rhs.norm();
  int k = 0;
  while (std::sqrt(rs) > stop && k < max_iter) {
    const Vec hp = apply_h(p);
    const double php = p.dot(hp);
    if (php <= 0.0) break;
    const double alpha = rs / php;
    u += alpha * p;
    r -= alpha * hp;
    const double rs_next = r.squaredNorm();
    p = r + (rs_next / rs) * p;
    rs = rs_next;
    ++k;
  }
}

}  // namespace

L1Result solve_l1_admm(const LinearOperator& A, const LinearOperator& T, const Vec& b,
                       double lambda_1, const ADMMConfig& cfg) {
  if (lambda_1 < 0.0) throw std::invalid_argument("solve_l1_admm: lambda_1 must be >= 0");
  const Index n = A.cols();
  const Index p = T.rows();
  const double rho = cfg.rho > 0.0 ? cfg.rho : (lambda_1 > 0.0 ? lambda_1 : 1.0);

  L1Result result;
  result.u = Vec::Zero(n);
  result.rho = rho;
  Vec z = Vec::Zero(p);
  Vec w = Vec::Zero(p);
  const Vec atb = A.apply_adjoint(b);

  for (int k = 1; k <= cfg.max_iter; ++k) {
    const Vec rhs = atb + 0.5 * rho * T.apply_adjoint(z - w);
    quad_update(A, T, 0.5 * rho, rhs, result.u, cfg.inner_cg);

    const Vec tu = T.apply(result.u);
    const Vec z_old = z;
    z = shrink(tu + w, lambda_1 / rho);
    w += tu - z;

    const double r_norm = (tu - z).norm();
    const double s_norm = rho * T.apply_adjoint(z - z_old).norm();
    result.primal_residual.push_back(r_norm);
    result.dual_residual.push_back(s_norm);
    result.iterations = k;

    const ResidualScales scales =
        stopping_thresholds(cfg, p, n, tu.norm(), z.norm(), rho * T.apply_adjoint(w).norm());
    if (r_norm <= scales.eps_pri && s_norm <= scales.eps_dual) {
      result.converged = true;
      break;
    }
  }
  result.z = std::move(z);
  result.w = std::move(w);
  return result;
}

L1Result solve_l1_admm_spectral(const SpectralModel& model, const Vec& b, double lambda_1,
                                const ADMMConfig& cfg) {
  if (lambda_1 < 0.0) throw std::invalid_argument("solve_l1_admm: lambda_1 must be >= 0");
  if (model.kind == SpectralKind::FourierMask)
    throw std::invalid_argument("solve_l1_admm_spectral: Fourier masks go through the general path");
  const Index n = model.n_total;
  const double rho = cfg.rho > 0.0 ? cfg.rho : (lambda_1 > 0.0 ? lambda_1 : 1.0);

  FDRegularizerSpec reg_spec;
  reg_spec.order = model.reg_order;
  reg_spec.n = model.n;
  reg_spec.dims = model.dims;
  const OperatorPtr T = make_fd_regularizer(reg_spec);
  const Index p = T->rows();

  const CVec b_hat = spectral_data_transform(model, b);
  const CVec atb_hat = model.forward_eigs.conjugate().cwiseProduct(b_hat);

  L1Result result;
  result.u = Vec::Zero(n);
  result.rho = rho;
  Vec z = Vec::Zero(p);
  Vec w = Vec::Zero(p);

  for (int k = 1; k <= cfg.max_iter; ++k) {
    // u-update: diagonal solve of (2 A^T A + rho T^T T) u = 2 A^T b + rho T^T (z - w)
    const Vec ttzw = T->apply_adjoint(z - w);
    const CVec ttzw_hat = (model.dims == 1) ? fft(ttzw) : fft2(ttzw, model.n, model.n);
    CVec u_hat(n);
    for (Index j = 0; j < n; ++j) {
      const double d = 2.0 * model.forward_eigs_sq[j] + rho * model.reg_eigs_sq[j];
      u_hat[j] = d > 0.0 ? (2.0 * atb_hat[j] + rho * ttzw_hat[j]) / d : Complex(0.0, 0.0);
    }
    result.u = spectral_inverse_transform(model, u_hat);

    const Vec tu = T->apply(result.u);
    const Vec z_old = z;
    z = shrink(tu + w, lambda_1 / rho);
    w += tu - z;

    const double r_norm = (tu - z).norm();
    const double s_norm = rho * T->apply_adjoint(z - z_old).norm();
    result.primal_residual.push_back(r_norm);
    result.dual_residual.push_back(s_norm);
    result.iterations = k;

    const ResidualScales scales =
        stopping_thresholds(cfg, p, n, tu.norm(), z.norm(), rho * T->apply_adjoint(w).norm());
    if (r_norm <= scales.eps_pri && s_norm <= scales.eps_dual) {
      result.converged = true;
      break;
    }
  }
  result.z = std::move(z);
  result.w = std::move(w);
  return result;
}

}  // namespace evsel
