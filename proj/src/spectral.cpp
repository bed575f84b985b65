#include "evidentsel/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evidentsel/dft.hpp"

namespace evsel {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_fd_args(int order, Index n) {
  if (order < 1) throw std::invalid_argument("fd eigenvalues: order must be >= 1");
  if (n <= 2 * order) throw std::invalid_argument("fd eigenvalues: requires n > 2r");
}

/// sin^{2r}(pi j / n) per-axis factors.
Vec axis_sin_powers(int order, Index n) {
  Vec s(n);
  for (Index j = 0; j < n; ++j) {
    const double sj = std::sin(kPi * static_cast<double>(j) / static_cast<double>(n));
    s[j] = std::pow(sj * sj, order);
  }
  return s;
}

Vec reg_eigs_sq_1d(int order, Index n) {
  return std::pow(4.0, order) * axis_sin_powers(order, n);
}

Vec reg_eigs_sq_2d(int order, Index n) {
  const Vec s = axis_sin_powers(order, n);
  const double scale = std::pow(4.0, order);
  Vec t(n * n);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k) t[j * n + k] = scale * (s[j] + s[k]);
  return t;
}

std::vector<Index> checked_mask(std::vector<Index> mask, Index n_total) {
  std::sort(mask.begin(), mask.end());
  if (std::adjacent_find(mask.begin(), mask.end()) != mask.end())
    throw std::invalid_argument("spectral model: duplicate mask indices");
  if (mask.empty() || mask.front() < 0 || mask.back() >= n_total)
    throw std::invalid_argument("spectral model: mask indices out of range");
  return mask;
}

}  // namespace

CVec fd_eigenvalues(int order, Index n) {
  require_fd_args(order, n);
  CVec g(n);
  for (Index j = 0; j < n; ++j) {
    const double phase = -2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
    const Complex base = Complex(std::cos(phase) - 1.0, std::sin(phase));
    Complex v = 1.0;
    for (int r = 0; r < order; ++r) v *= base;
    g[j] = v;
  }
  return g;
}

Vec fd_eigenvalues_sq(int order, Index n) {
  require_fd_args(order, n);
  return reg_eigs_sq_1d(order, n);
}

CVec circulant_eigenvalues(const Vec& first_column) {
  if (first_column.size() == 0) throw std::invalid_argument("circulant eigenvalues: empty column");
  return dft_unnormalized(first_column);
}

// ---------------------------------------------------------------------------
// Model constructors

SpectralModel SpectralModel::denoise_1d(Index n, int reg_order) {
  require_fd_args(reg_order, n);
  SpectralModel m;
  m.kind = SpectralKind::Denoise;
  m.dims = 1;
  m.n = n;
  m.n_total = n;
  m.m = n;
  m.reg_order = reg_order;
  m.forward_eigs = CVec::Ones(n);
  m.forward_eigs_sq = Vec::Ones(n);
  m.reg_eigs_sq = reg_eigs_sq_1d(reg_order, n);
  return m;
}

SpectralModel SpectralModel::denoise_2d(Index n, int reg_order) {
  require_fd_args(reg_order, n);
  SpectralModel m;
  m.kind = SpectralKind::Denoise;
  m.dims = 2;
  m.n = n;
  m.n_total = n * n;
  m.m = n * n;
  m.reg_order = reg_order;
  m.forward_eigs = CVec::Ones(m.n_total);
  m.forward_eigs_sq = Vec::Ones(m.n_total);
  m.reg_eigs_sq = reg_eigs_sq_2d(reg_order, n);
  return m;
}

SpectralModel SpectralModel::denoise_custom(Vec reg_eigs_sq) {
  const Index n = reg_eigs_sq.size();
  if (n == 0) throw std::invalid_argument("spectral model: empty regularizer spectrum");
  if (reg_eigs_sq.minCoeff() < 0.0)
    throw std::invalid_argument("spectral model: |gamma|^2 must be nonnegative");
  SpectralModel m;
  m.kind = SpectralKind::Denoise;
  m.dims = 1;
  m.n = n;
  m.n_total = n;
  m.m = n;
  m.reg_order = 0;
  m.forward_eigs = CVec::Ones(n);
  m.forward_eigs_sq = Vec::Ones(n);
  m.reg_eigs_sq = std::move(reg_eigs_sq);
  return m;
}

SpectralModel SpectralModel::deconvolve_1d(const Vec& psf_first_column, int reg_order) {
  const Index n = psf_first_column.size();
  require_fd_args(reg_order, n);
  SpectralModel m;
  m.kind = SpectralKind::Deconvolve;
  m.dims = 1;
  m.n = n;
  m.n_total = n;
  m.m = n;
  m.reg_order = reg_order;
  m.forward_eigs = dft_unnormalized(psf_first_column);
  m.forward_eigs_sq = m.forward_eigs.cwiseAbs2();
  m.reg_eigs_sq = reg_eigs_sq_1d(reg_order, n);
  return m;
}

SpectralModel SpectralModel::deconvolve_2d(const Mat& psf_kernel, int reg_order) {
  const Index n = psf_kernel.rows();
  if (psf_kernel.cols() != n) throw std::invalid_argument("spectral model: kernel must be square");
  require_fd_args(reg_order, n);
  SpectralModel m;
  m.kind = SpectralKind::Deconvolve;
  m.dims = 2;
  m.n = n;
  m.n_total = n * n;
  m.m = n * n;
  m.reg_order = reg_order;
  Vec flat(n * n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) flat[r * n + c] = psf_kernel(r, c);
  m.forward_eigs = dft2_unnormalized(flat, n, n);
  m.forward_eigs_sq = m.forward_eigs.cwiseAbs2();
  m.reg_eigs_sq = reg_eigs_sq_2d(reg_order, n);
  return m;
}

SpectralModel SpectralModel::fourier_mask_1d(Index n, std::vector<Index> mask, int reg_order) {
  require_fd_args(reg_order, n);
  SpectralModel m;
  m.kind = SpectralKind::FourierMask;
  m.dims = 1;
  m.n = n;
  m.n_total = n;
  m.reg_order = reg_order;
  m.mask = checked_mask(std::move(mask), n);
  m.m = static_cast<Index>(m.mask.size());
  m.forward_eigs = CVec::Zero(n);
  m.forward_eigs_sq = Vec::Zero(n);
  for (Index idx : m.mask) {
    m.forward_eigs[idx] = 1.0;
    m.forward_eigs_sq[idx] = 1.0;
  }
  m.reg_eigs_sq = reg_eigs_sq_1d(reg_order, n);
  return m;
}

SpectralModel SpectralModel::fourier_mask_2d(Index n, std::vector<Index> mask, int reg_order) {
  require_fd_args(reg_order, n);
  SpectralModel m;
  m.kind = SpectralKind::FourierMask;
  m.dims = 2;
  m.n = n;
  m.n_total = n * n;
  m.reg_order = reg_order;
  m.mask = checked_mask(std::move(mask), m.n_total);
  m.m = static_cast<Index>(m.mask.size());
  m.forward_eigs = CVec::Zero(m.n_total);
  m.forward_eigs_sq = Vec::Zero(m.n_total);
  for (Index idx : m.mask) {
    m.forward_eigs[idx] = 1.0;
    m.forward_eigs_sq[idx] = 1.0;
  }
  m.reg_eigs_sq = reg_eigs_sq_2d(reg_order, n);
  return m;
}

// ---------------------------------------------------------------------------
// Traces, solve, norms

SpectralTraces spectral_traces(const SpectralModel& model, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("spectral traces: lambda must be >= 0");
  const bool masked = model.kind == SpectralKind::FourierMask;
  SpectralTraces out;
  double degenerate = 0.0;
  for (Index j = 0; j < model.n_total; ++j) {
    const double f = model.forward_eigs_sq[j];
    const double t = model.reg_eigs_sq[j];
    const double d = f + lambda * t;
    if (d <= 0.0) {
      degenerate += 1.0;
      continue;
    }
    out.trace_a += f / d;
    out.trace_t += t / d;
    const double lt = lambda * t / d;
    if (masked) {
      if (f > 0.0) out.resid_a += lt;  // m counts mask rows only
    } else {
      out.resid_a += lt;
    }
    out.resid_t += f / d;
  }
  out.resid_t += degenerate;
  if (!masked) out.resid_a += degenerate;
  return out;
}

CVec spectral_solve(const SpectralModel& model, const CVec& b_hat, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("spectral solve: lambda must be >= 0");
  if (b_hat.size() != model.n_total)
    throw std::invalid_argument("spectral solve: b_hat length mismatch");
  CVec u_hat(model.n_total);
  for (Index j = 0; j < model.n_total; ++j) {
    const double d = model.forward_eigs_sq[j] + lambda * model.reg_eigs_sq[j];
    u_hat[j] = (d > 0.0) ? std::conj(model.forward_eigs[j]) * b_hat[j] / d : Complex(0.0, 0.0);
  }
  return u_hat;
}

SpectralNorms spectral_norms(const SpectralModel& model, const CVec& u_hat, const CVec& b_hat) {
  if (u_hat.size() != model.n_total || b_hat.size() != model.n_total)
    throw std::invalid_argument("spectral norms: array length mismatch");
  SpectralNorms out;
  for (Index j = 0; j < model.n_total; ++j) {
    out.data_misfit += std::norm(model.forward_eigs[j] * u_hat[j] - b_hat[j]);
    out.reg_norm += model.reg_eigs_sq[j] * std::norm(u_hat[j]);
  }
  return out;
}

SpectralNorms spectral_solution_norms(const SpectralModel& model, const CVec& b_hat,
                                      double lambda) {
  if (b_hat.size() != model.n_total)
    throw std::invalid_argument("spectral norms: b_hat length mismatch");
  SpectralNorms out;
  for (Index j = 0; j < model.n_total; ++j) {
    const double f = model.forward_eigs_sq[j];
    const double t = model.reg_eigs_sq[j];
    const double d = f + lambda * t;
    const double b2 = std::norm(b_hat[j]);
    if (d <= 0.0) {
      out.data_misfit += b2;  // solution entry is zero there
      continue;
    }
    const double rfac = lambda * t / d;
    out.data_misfit += rfac * rfac * b2;
    out.reg_norm += t * f * b2 / (d * d);
  }
  return out;
}

CVec embed_mask_data(const SpectralModel& model, const CVec& b_mask) {
  if (model.kind != SpectralKind::FourierMask)
    throw std::invalid_argument("embed_mask_data: model is not a Fourier mask");
  if (b_mask.size() != static_cast<Index>(model.mask.size()))
    throw std::invalid_argument("embed_mask_data: data length != |S|");
  CVec full = CVec::Zero(model.n_total);
  for (Index i = 0; i < b_mask.size(); ++i) full[model.mask[i]] = b_mask[i];
  return full;
}

CVec spectral_data_transform(const SpectralModel& model, const Vec& b) {
  if (model.kind == SpectralKind::FourierMask)
    throw std::invalid_argument("spectral_data_transform: mask data is already spectral");
  if (b.size() != model.n_total)
    throw std::invalid_argument("spectral_data_transform: data length mismatch");
  return (model.dims == 1) ? fft(b) : fft2(b, model.n, model.n);
}

Vec spectral_inverse_transform(const SpectralModel& model, const CVec& u_hat) {
  if (u_hat.size() != model.n_total)
    throw std::invalid_argument("spectral_inverse_transform: length mismatch");
  return (model.dims == 1) ? ifft_real(u_hat) : ifft2_real(u_hat, model.n, model.n);
}

}  // namespace evsel
