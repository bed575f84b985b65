#pragma once

#include <vector>

#include "evidentsel/types.hpp"

namespace evsel {

/// Eigenvalues gamma_j = (e^{-i2pi j/n} - 1)^r of the order-r circular
/// difference (DFT of the first column of T_r^T). Requires n > 2r.
CVec fd_eigenvalues(int order, Index n);

/// |gamma_j|^2 = 4^r sin^{2r}(pi j / n), evaluated in the sine form.
Vec fd_eigenvalues_sq(int order, Index n);

/// Unnormalized DFT of the given vector: for a circulant matrix C this is
/// the eigenvalue array when the vector is the first column of C^T (equal
/// to the first column of C itself up to conjugation of the spectrum).
CVec circulant_eigenvalues(const Vec& first_column);

enum class SpectralKind { Denoise, Deconvolve, FourierMask };

/// Diagonalized model of || A u - b ||^2 + lambda || T_r u ||^2 for
/// problems the unitary DFT diagonalizes. All arrays have length n_total
/// and are indexed by (flattened, row-major in 2D) frequency.
struct SpectralModel {
  SpectralKind kind = SpectralKind::Denoise;
  int dims = 1;
  Index n = 0;        // per-axis size
  Index n_total = 0;  // n or n^2
  Index m = 0;        // data length: n_total, or |S| for Fourier masks
  int reg_order = 1;

  CVec forward_eigs;     // gamma_j(C); indicator of S for masks
  Vec forward_eigs_sq;   // |gamma_j(C)|^2
  Vec reg_eigs_sq;       // |gamma_j(T_r)|^2
  std::vector<Index> mask;  // sorted, only for FourierMask

  static SpectralModel denoise_1d(Index n, int reg_order);
  static SpectralModel denoise_2d(Index n, int reg_order);
  /// Denoising with an explicit |gamma(T)|^2 array (e.g. T = I);
  /// reg_order 0 marks the custom spectrum.
  static SpectralModel denoise_custom(Vec reg_eigs_sq);
  static SpectralModel deconvolve_1d(const Vec& psf_first_column, int reg_order);
  static SpectralModel deconvolve_2d(const Mat& psf_kernel, int reg_order);
  static SpectralModel fourier_mask_1d(Index n, std::vector<Index> mask, int reg_order);
  static SpectralModel fourier_mask_2d(Index n, std::vector<Index> mask, int reg_order);
};

/// trace(H^-1 A^T A) and trace(H^-1 T^T T) with H = A^T A + lambda T^T T,
/// as exact diagonal sums. resid_a and resid_t are m - trace_a and
/// n_total - lambda * trace_t accumulated summand-wise, which stays
/// accurate when lambda is tiny; frequencies where both eigenvalues vanish
/// follow the pseudo-inverse convention (they contribute nothing to either
/// trace and leave resid_t counting the null direction).
struct SpectralTraces {
  double trace_a = 0.0;
  double trace_t = 0.0;
  double resid_a = 0.0;  // m - trace_a
  double resid_t = 0.0;  // n_total - lambda * trace_t
};

SpectralTraces spectral_traces(const SpectralModel& model, double lambda);

/// Tikhonov solution in the DFT domain:
/// u_hat_j = conj(gamma_j) b_hat_j / (|gamma_j|^2 + lambda t_j),
/// zero where the denominator vanishes. For masks, b_hat must be the data
/// embedded at the mask indices (zeros elsewhere).
CVec spectral_solve(const SpectralModel& model, const CVec& b_hat, double lambda);

struct SpectralNorms {
  double data_misfit = 0.0;  // ||A u - b||^2, evaluated in the DFT domain
  double reg_norm = 0.0;     // ||T u||^2
};

/// Norms for an arbitrary DFT-domain iterate; no inverse transform is done.
SpectralNorms spectral_norms(const SpectralModel& model, const CVec& u_hat, const CVec& b_hat);

/// Norms at the exact Tikhonov solution for this lambda, computed directly
/// from b_hat in cancellation-free form (residual factor lambda t / (f + lambda t)).
SpectralNorms spectral_solution_norms(const SpectralModel& model, const CVec& b_hat,
                                      double lambda);

/// Scatter mask-domain data into a full-length DFT vector.
CVec embed_mask_data(const SpectralModel& model, const CVec& b_mask);

/// b_hat for a spatial data vector: forward unitary DFT (1D or 2D).
CVec spectral_data_transform(const SpectralModel& model, const Vec& b);

/// Spatial solution from its DFT representation (real part).
Vec spectral_inverse_transform(const SpectralModel& model, const CVec& u_hat);

}  // namespace evsel
