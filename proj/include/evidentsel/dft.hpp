#pragma once

#include "evidentsel/types.hpp"

namespace evsel {

// Unitary DFT primitive (FFTW behind a plan cache). Forward kernel is
// e^{-i2pi jk/n}/sqrt(n), so Parseval holds exactly: ||Fx|| = ||x||.
// 2D transforms act on row-major flattened arrays of shape rows x cols.

CVec fft(const CVec& x);
CVec ifft(const CVec& x);
CVec fft2(const CVec& x, Index rows, Index cols);
CVec ifft2(const CVec& x, Index rows, Index cols);

CVec fft(const Vec& x);
CVec fft2(const Vec& x, Index rows, Index cols);

/// Real part of the inverse transform; imaginary residue is discarded.
Vec ifft_real(const CVec& x);
Vec ifft2_real(const CVec& x, Index rows, Index cols);

/// Unnormalized forward DFT (no 1/sqrt(n)); eigenvalue computations use it.
CVec dft_unnormalized(const CVec& x);
CVec dft_unnormalized(const Vec& x);
CVec dft2_unnormalized(const Vec& x, Index rows, Index cols);

}  // namespace evsel
