#include <doctest.h>

#include <algorithm>

#include "evidentsel/dft.hpp"
#include "evidentsel/operators.hpp"
#include "evidentsel/rng.hpp"
#include "evidentsel/spectral.hpp"
#include "oracles.hpp"

using namespace evsel;

TEST_CASE("dft primitive is unitary") {
  Rng rng(1);
  const Vec x = gaussian_vector(rng, 77);
  CHECK(std::abs(fft(x).norm() - x.norm()) <= 1e-12 * x.norm());
  const Vec img = gaussian_vector(rng, 12 * 12);
  CHECK(std::abs(fft2(img, 12, 12).norm() - img.norm()) <= 1e-12 * img.norm());
  CHECK((ifft_real(fft(x)) - x).norm() <= 1e-12 * x.norm());
}

TEST_CASE("fd eigenvalues r=1 n=4 squared magnitudes") {
  const Vec t = fd_eigenvalues_sq(1, 4);
  CHECK(t[0] == doctest::Approx(0.0));
  CHECK(t[1] == doctest::Approx(2.0));
  CHECK(t[2] == doctest::Approx(4.0));
  CHECK(t[3] == doctest::Approx(2.0));
}

TEST_CASE("fd eigenvalues r=1 mean power equals 2 for any n") {
  for (Index n : {static_cast<Index>(5), static_cast<Index>(16), static_cast<Index>(101)}) {
    const Vec t = fd_eigenvalues_sq(1, n);
    CHECK(t.sum() / static_cast<double>(n) == doctest::Approx(2.0).epsilon(1e-13));
  }
}

TEST_CASE("fd eigenvalues r=2 match the dense eigen-oracle") {
  const Index n = 16;
  FDRegularizer1D t2(2, n);
  const Mat dense = materialize(t2);
  // eigenvalues of T2^T T2, sorted
  Eigen::SelfAdjointEigenSolver<Mat> eig(dense.transpose() * dense);
  Vec oracle = eig.eigenvalues();
  Vec ours = fd_eigenvalues_sq(2, n);
  std::sort(ours.data(), ours.data() + n);
  CHECK((ours - oracle).cwiseAbs().maxCoeff() <= 1e-10);

  // complex form squares to the same magnitudes
  const CVec g = fd_eigenvalues(2, n);
  CHECK((g.cwiseAbs2() - fd_eigenvalues_sq(2, n)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("circulant eigenvalues: delta gives the all-ones spectrum") {
  Vec delta = Vec::Zero(9);
  delta[0] = 1.0;
  const CVec g = circulant_eigenvalues(delta);
  CHECK((g - CVec::Ones(9)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("circulant eigenvalues of T1^T's first column match the formula") {
  const Index n = 12;
  Vec col = Vec::Zero(n);
  col[0] = -1.0;
  col[1] = 1.0;  // first column of T1^T
  const CVec g = circulant_eigenvalues(col);
  const CVec expected = fd_eigenvalues(1, n);
  CHECK((g - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("gaussian psf spectrum is real, positive, and peaks at DC") {
  const Vec psf = make_gaussian_psf(64, 2.0);
  const CVec g = circulant_eigenvalues(psf);
  CHECK(g.imag().cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(g.real().minCoeff() > 0.0);
  Index argmax = 0;
  g.real().maxCoeff(&argmax);
  CHECK(argmax == 0);
  CHECK(g[0].real() == doctest::Approx(1.0).epsilon(1e-12));

  // wider kernels push the tail below machine noise; it may round to zero
  // but never goes materially negative
  const CVec wide = circulant_eigenvalues(make_gaussian_psf(64, 3.0));
  CHECK(wide.real().minCoeff() >= -1e-15);
}

TEST_CASE("spectral traces collapse at lambda = 0 for denoising") {
  const SpectralModel model = SpectralModel::denoise_1d(16, 1);
  const SpectralTraces tr = spectral_traces(model, 0.0);
  CHECK(tr.trace_a == doctest::Approx(16.0).epsilon(1e-14));
  CHECK(tr.trace_t == doctest::Approx(model.reg_eigs_sq.sum()).epsilon(1e-14));
}

TEST_CASE("trace identity holds for random models and lambdas") {
  Rng rng(42);
  for (int rep = 0; rep < 50; ++rep) {
    SpectralModel model;
    const int pick = static_cast<int>(rng.raw() % 4);
    const int order = 1 + static_cast<int>(rng.raw() % 3);
    if (pick == 0) {
      model = SpectralModel::denoise_1d(16 + static_cast<Index>(rng.raw() % 48), order);
    } else if (pick == 1) {
      model = SpectralModel::denoise_2d(8 + static_cast<Index>(rng.raw() % 8), order);
    } else if (pick == 2) {
      const Index n = 16 + static_cast<Index>(rng.raw() % 48);
      model = SpectralModel::deconvolve_1d(make_gaussian_psf(n, 0.5 + 2.5 * rng.uniform()), order);
    } else {
      const Index n = 32;
      std::vector<Index> mask{0};  // keep DC so H stays nonsingular
      for (Index j = 1; j < n; ++j)
        if (rng.uniform() < 0.4) mask.push_back(j);
      model = SpectralModel::fourier_mask_1d(n, mask, order);
    }
    const double lambda = std::exp(rng.uniform(-4.0, 4.0));
    const SpectralTraces tr = spectral_traces(model, lambda);
    const double total = tr.trace_a + lambda * tr.trace_t;
    CHECK(std::abs(total - static_cast<double>(model.n_total)) <=
          1e-12 * static_cast<double>(model.n_total));
    // the stable complements agree with the plain differences
    CHECK(tr.resid_a ==
          doctest::Approx(static_cast<double>(model.m) - tr.trace_a).epsilon(1e-10));
    CHECK(tr.resid_t ==
          doctest::Approx(static_cast<double>(model.n_total) - lambda * tr.trace_t)
              .epsilon(1e-10));
  }
}

TEST_CASE("degenerate mask frequencies follow the pseudo-inverse convention") {
  // S excludes DC and r >= 1, so frequency 0 has f = t = 0.
  const SpectralModel model = SpectralModel::fourier_mask_1d(8, {1, 2, 5}, 1);
  const SpectralTraces tr = spectral_traces(model, 0.7);
  CHECK(tr.trace_a + 0.7 * tr.trace_t == doctest::Approx(7.0).epsilon(1e-12));  // n - 1 null dir
  const CVec u = spectral_solve(model, CVec::Ones(8), 0.7);
  CHECK(std::abs(u[0]) == 0.0);
}

TEST_CASE("spectral traces match the dense inverse oracle (1D)") {
  const Index n = 16;
  FDRegularizer1D t1(1, n);
  const Mat t_dense = materialize(t1);
  const Mat a_dense = Mat::Identity(n, n);
  const SpectralModel model = SpectralModel::denoise_1d(n, 1);
  const auto oracle = oracles::dense_traces(a_dense, t_dense, 0.7);
  const SpectralTraces tr = spectral_traces(model, 0.7);
  CHECK(tr.trace_a == doctest::Approx(oracle.trace_a).epsilon(1e-10));
  CHECK(tr.trace_t == doctest::Approx(oracle.trace_t).epsilon(1e-10));
}

TEST_CASE("spectral traces match the dense inverse oracle (2D, deconvolution, mask)") {
  const Index n = 8;
  // 2D denoising
  {
    FDRegularizer2D t(1, n);
    const Mat t_dense = materialize(t);
    const auto oracle = oracles::dense_traces(Mat::Identity(n * n, n * n), t_dense, 2.3);
    const SpectralTraces tr = spectral_traces(SpectralModel::denoise_2d(n, 1), 2.3);
    CHECK(tr.trace_a == doctest::Approx(oracle.trace_a).epsilon(1e-8));
    CHECK(tr.trace_t == doctest::Approx(oracle.trace_t).epsilon(1e-8));
  }
  // 1D deconvolution
  {
    const Vec psf = make_gaussian_psf(12, 1.0);
    CirculantOperator c(psf);
    FDRegularizer1D t2(2, 12);
    const auto oracle = oracles::dense_traces(materialize(c), materialize(t2), 0.37);
    const SpectralTraces tr = spectral_traces(SpectralModel::deconvolve_1d(psf, 2), 0.37);
    CHECK(tr.trace_a == doctest::Approx(oracle.trace_a).epsilon(1e-8));
    CHECK(tr.trace_t == doctest::Approx(oracle.trace_t).epsilon(1e-8));
  }
  // Fourier mask
  {
    const std::vector<Index> mask{0, 1, 2, 6, 9, 11};
    FDRegularizer1D t1(1, 12);
    const auto oracle = oracles::dense_mask_traces(12, mask, materialize(t1), 1.9);
    const SpectralTraces tr =
        spectral_traces(SpectralModel::fourier_mask_1d(12, mask, 1), 1.9);
    CHECK(tr.trace_a == doctest::Approx(oracle.trace_a).epsilon(1e-8));
    CHECK(tr.trace_t == doctest::Approx(oracle.trace_t).epsilon(1e-8));
  }
}

TEST_CASE("spectral solve: unregularized denoising is the identity") {
  const SpectralModel model = SpectralModel::denoise_1d(16, 1);
  Rng rng(2);
  const CVec b_hat = fft(gaussian_vector(rng, 16));
  const CVec u_hat = spectral_solve(model, b_hat, 0.0);
  CHECK((u_hat - b_hat).norm() <= 1e-14 * b_hat.norm());
}

TEST_CASE("spectral solve matches the dense Tikhonov oracle") {
  const Index n = 16;
  const Vec psf = make_gaussian_psf(n, 1.0);
  CirculantOperator c(psf);
  FDRegularizer1D t1(1, n);
  Rng rng(3);
  const Vec b = gaussian_vector(rng, n);

  const Vec oracle = oracles::dense_tikhonov_solve(materialize(c), materialize(t1), b, 0.3);
  const SpectralModel model = SpectralModel::deconvolve_1d(psf, 1);
  const Vec ours = spectral_inverse_transform(model, spectral_solve(model, fft(b), 0.3));
  CHECK((ours - oracle).norm() <= 1e-8 * oracle.norm());
}

TEST_CASE("spectral solve is the exact minimizer (gradient oracle)") {
  const Index n = 16;
  const Vec psf = make_gaussian_psf(n, 1.3);
  CirculantOperator c(psf);
  FDRegularizer1D t2(2, n);
  const Mat a_dense = materialize(c);
  const Mat t_dense = materialize(t2);
  Rng rng(4);
  const Vec b = gaussian_vector(rng, n);
  const SpectralModel model = SpectralModel::deconvolve_1d(psf, 2);
  const Vec u = spectral_inverse_transform(model, spectral_solve(model, fft(b), 0.9));
  const Vec atb = a_dense.transpose() * b;
  const Vec grad =
      a_dense.transpose() * (a_dense * u) + 0.9 * t_dense.transpose() * (t_dense * u) - atb;
  CHECK(grad.norm() <= 1e-8 * atb.norm());
}

TEST_CASE("full-mask sampling at lambda = 0 inverts the data exactly") {
  const Index n = 16;
  std::vector<Index> all(n);
  for (Index j = 0; j < n; ++j) all[j] = j;
  const SpectralModel model = SpectralModel::fourier_mask_1d(n, all, 1);
  Rng rng(5);
  const Vec u_true = gaussian_vector(rng, n);
  const CVec b = fft(u_true);  // fully sampled DFT data
  const CVec u_hat = spectral_solve(model, embed_mask_data(model, b), 0.0);
  CHECK((spectral_inverse_transform(model, u_hat) - u_true).norm() <= 1e-12 * u_true.norm());
}

TEST_CASE("mask solve matches the dense complex oracle") {
  const Index n = 12;
  const std::vector<Index> mask{0, 1, 3, 4, 8, 11};
  FDRegularizer1D t1(1, n);
  Rng rng(6);
  CVec b_mask(static_cast<Index>(mask.size()));
  for (Index i = 0; i < b_mask.size(); ++i) b_mask[i] = Complex(rng.normal(), rng.normal());

  const CVec oracle = oracles::dense_mask_solve(n, mask, materialize(t1), b_mask, 0.8);
  const SpectralModel model = SpectralModel::fourier_mask_1d(n, mask, 1);
  const CVec ours_hat = spectral_solve(model, embed_mask_data(model, b_mask), 0.8);
  const CVec ours = oracles::dense_dft(n).adjoint() * ours_hat;  // inverse DFT, keep complex
  CHECK((ours - oracle).norm() <= 1e-8 * oracle.norm());
}

TEST_CASE("spectral norms: trivial cases") {
  const SpectralModel model = SpectralModel::denoise_1d(16, 1);
  Rng rng(7);
  const CVec b_hat = fft(gaussian_vector(rng, 16));
  SUBCASE("lambda=0 denoising leaves no misfit") {
    const SpectralNorms norms = spectral_norms(model, b_hat, b_hat);
    CHECK(norms.data_misfit <= 1e-24);
  }
  SUBCASE("zero solution leaves the full data norm") {
    const SpectralNorms norms = spectral_norms(model, CVec::Zero(16), b_hat);
    CHECK(norms.data_misfit == doctest::Approx(b_hat.squaredNorm()).epsilon(1e-13));
    CHECK(norms.reg_norm == 0.0);
  }
  SUBCASE("mask misfit is restricted to S") {
    const SpectralModel masked = SpectralModel::fourier_mask_1d(16, {1, 2, 7}, 1);
    const CVec b_emb = embed_mask_data(masked, CVec::Ones(3));
    const SpectralNorms norms = spectral_norms(masked, CVec::Zero(16), b_emb);
    CHECK(norms.data_misfit == doctest::Approx(3.0).epsilon(1e-13));
  }
}

TEST_CASE("spectral norms match the spatial oracle on a deconvolution") {
  const Index n = 32;
  const Vec psf = make_gaussian_psf(n, 2.0);
  CirculantOperator c(psf);
  FDRegularizer1D t1(1, n);
  Rng rng(8);
  const Vec b = gaussian_vector(rng, n);
  const Vec u = gaussian_vector(rng, n);

  const SpectralModel model = SpectralModel::deconvolve_1d(psf, 1);
  const SpectralNorms norms = spectral_norms(model, fft(u), fft(b));
  const double misfit_oracle = (c.apply(u) - b).squaredNorm();
  const double reg_oracle = t1.apply(u).squaredNorm();
  CHECK(norms.data_misfit == doctest::Approx(misfit_oracle).epsilon(1e-10));
  CHECK(norms.reg_norm == doctest::Approx(reg_oracle).epsilon(1e-10));
}

TEST_CASE("solution norms agree with norms evaluated at the solve") {
  const Index n = 24;
  const Vec psf = make_gaussian_psf(n, 1.2);
  const SpectralModel model = SpectralModel::deconvolve_1d(psf, 2);
  Rng rng(9);
  const CVec b_hat = fft(gaussian_vector(rng, n));
  for (double lambda : {1e-9, 1e-3, 1.0, 50.0}) {
    const CVec u_hat = spectral_solve(model, b_hat, lambda);
    const SpectralNorms via_uhat = spectral_norms(model, u_hat, b_hat);
    const SpectralNorms direct = spectral_solution_norms(model, b_hat, lambda);
    CHECK(direct.data_misfit ==
          doctest::Approx(via_uhat.data_misfit).epsilon(1e-9));
    CHECK(direct.reg_norm == doctest::Approx(via_uhat.reg_norm).epsilon(1e-9));
  }
}

TEST_CASE("dense-oracle equivalence of the 2D deconvolution model") {
  const Index n = 8;
  const Mat psf = make_gaussian_psf_2d(n, 1.1);
  Circulant2DOperator c(psf);
  FDRegularizer2D t1(1, n);
  Rng rng(10);
  const Vec b = gaussian_vector(rng, n * n);
  const double lambda = 0.45;

  const Mat a_dense = materialize(c);
  const Mat t_dense = materialize(t1);
  const Vec oracle = oracles::dense_tikhonov_solve(a_dense, t_dense, b, lambda);
  const SpectralModel model = SpectralModel::deconvolve_2d(psf, 1);
  const Vec ours =
      spectral_inverse_transform(model, spectral_solve(model, fft2(b, n, n), lambda));
  CHECK((ours - oracle).norm() <= 1e-8 * oracle.norm());

  const auto tr_oracle = oracles::dense_traces(a_dense, t_dense, lambda);
  const SpectralTraces tr = spectral_traces(model, lambda);
  CHECK(tr.trace_a == doctest::Approx(tr_oracle.trace_a).epsilon(1e-8));
  CHECK(tr.trace_t == doctest::Approx(tr_oracle.trace_t).epsilon(1e-8));
}
