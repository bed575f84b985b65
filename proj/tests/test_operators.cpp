#include <doctest.h>

#include "evidentsel/dft.hpp"
#include "evidentsel/operators.hpp"
#include "evidentsel/rng.hpp"
#include "oracles.hpp"

using namespace evsel;

TEST_CASE("identity operator passes vectors through") {
  IdentityOperator id(3);
  Vec x(3);
  x << 1, 2, 3;
  CHECK(id.apply(x) == x);
  CHECK(id.apply_adjoint(x) == x);
}

TEST_CASE("first-difference circulant annihilates constants") {
  const Index n = 8;
  Vec col = Vec::Zero(n);
  col[0] = -1.0;
  col[n - 1] = 1.0;  // row stencil [-1, 1] with wrap
  CirculantOperator t1(col);
  const Vec c = Vec::Constant(n, 3.7);
  CHECK(t1.apply(c).norm() < 1e-12);
}

TEST_CASE("dense apply matches explicit matrix-vector product") {
  Rng rng(11);
  const Mat a = gaussian_matrix(rng, 8, 8);
  DenseOperator op(a);
  const Vec x = gaussian_vector(rng, 8);
  CHECK((op.apply(x) - a * x).norm() <= 1e-12 * (a * x).norm());
  CHECK((op.apply_adjoint(x) - a.transpose() * x).norm() <= 1e-12);
  CHECK((op.apply_gram(x) - a.transpose() * (a * x)).norm() <= 1e-10);
}

TEST_CASE("operators reject dimension mismatches") {
  Rng rng(3);
  DenseOperator op(gaussian_matrix(rng, 4, 6));
  CHECK_THROWS_AS(op.apply(Vec::Zero(5)), std::invalid_argument);
  CHECK_THROWS_AS(op.apply_adjoint(Vec::Zero(6)), std::invalid_argument);
}

TEST_CASE("fd regularizer r=1 n=4 has the displayed cyclic rows") {
  FDRegularizer1D t1(1, 4);
  const Mat dense = materialize(t1);
  Mat expected(4, 4);
  expected << -1, 1, 0, 0,
               0, -1, 1, 0,
               0, 0, -1, 1,
               1, 0, 0, -1;
  CHECK((dense - expected).norm() == 0.0);
}

TEST_CASE("fd regularizer r=2 equals the squared first difference") {
  FDRegularizer1D t1(1, 5), t2(2, 5);
  const Mat d1 = materialize(t1);
  const Mat d2 = materialize(t2);
  CHECK((d2 - d1 * d1).norm() <= 1e-12);
}

TEST_CASE("fd regularizer rejects n <= 2r") {
  CHECK_THROWS_AS(FDRegularizer1D(2, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_fd_regularizer({3, 6, 1}), std::invalid_argument);
}

TEST_CASE("2D fd regularizer stacks both axes") {
  FDRegularizer2D t(1, 4);
  CHECK(t.rows() == 32);
  CHECK(t.cols() == 16);
  // row differences act within image rows, column differences across them
  Vec x = Vec::Zero(16);
  x[5] = 1.0;  // pixel (1,1)
  const Vec y = t.apply(x);
  CHECK(y[4] == 1.0);    // (T_x)(1,0) = x(1,1) - x(1,0)
  CHECK(y[5] == -1.0);   // (T_x)(1,1)
  CHECK(y[16 + 1] == 1.0);   // (T_y)(0,1) = x(1,1) - x(0,1)
  CHECK(y[16 + 5] == -1.0);  // (T_y)(1,1)
  const Vec c = Vec::Constant(16, 2.0);
  CHECK(t.apply(c).norm() == 0.0);
}

TEST_CASE("fd regularizers annihilate constants for all orders") {
  for (int r = 1; r <= 3; ++r) {
    for (Index n : {static_cast<Index>(9), static_cast<Index>(16)}) {
      FDRegularizer1D t(r, n);
      CHECK(t.apply(Vec::Constant(n, 1.0)).norm() < 1e-12);
    }
  }
}

TEST_CASE("adjoint identity holds for every operator kind") {
  Rng rng(17);
  std::vector<std::shared_ptr<const LinearOperator>> ops;
  ops.push_back(std::make_shared<DenseOperator>(gaussian_matrix(rng, 12, 9)));
  ops.push_back(std::make_shared<CirculantOperator>(make_gaussian_psf(16, 2.0)));
  ops.push_back(std::make_shared<Circulant2DOperator>(make_gaussian_psf_2d(8, 1.5)));
  ops.push_back(std::make_shared<FDRegularizer1D>(2, 16));
  ops.push_back(std::make_shared<FDRegularizer2D>(1, 6));
  ops.push_back(std::make_shared<FourierMaskOperator>(16, std::vector<Index>{0, 1, 3, 7, 9, 13, 15}, 1));
  RadonSpec spec;
  spec.n = 8;
  spec.angles_deg = {0, 30, 60, 90, 120, 150};
  spec.detector_count = 13;
  ops.push_back(make_radon(spec));

  for (const auto& op : ops) CHECK(oracles::adjoint_defect(*op, 100, 99) <= 1e-10);
}

TEST_CASE("circulant apply equals dense oracle for n <= 32") {
  Rng rng(23);
  for (Index n : {static_cast<Index>(7), static_cast<Index>(16), static_cast<Index>(32)}) {
    const Vec col = gaussian_vector(rng, n);
    CirculantOperator op(col);
    const Mat dense = oracles::dense_circulant(col);
    const Vec x = gaussian_vector(rng, n);
    CHECK((op.apply(x) - dense * x).norm() <= 1e-12 * std::max(1.0, (dense * x).norm()));
    CHECK((op.apply_adjoint(x) - dense.transpose() * x).norm() <= 1e-11);
  }
}

TEST_CASE("gaussian psf is normalized and degenerates to a delta") {
  const Vec delta = make_gaussian_psf(32, 0.0);
  CHECK(delta[0] == 1.0);
  CHECK(delta.tail(31).norm() == 0.0);

  for (double omega : {0.5, 1.5, 3.0}) {
    const Vec k = make_gaussian_psf(64, omega);
    CHECK(std::abs(k.sum() - 1.0) <= 1e-12);
    CHECK(k.minCoeff() >= 0.0);
    const Mat k2 = make_gaussian_psf_2d(16, omega);
    CHECK(std::abs(k2.sum() - 1.0) <= 1e-12);
  }
}

TEST_CASE("blur then unregularized deblur round-trips when spectrum is safe") {
  const Index n = 256;
  const Vec psf = make_gaussian_psf(n, 1.5);
  CirculantOperator c(psf);
  REQUIRE(c.spectrum().cwiseAbs().minCoeff() > 1e-12);

  Rng rng(5);
  Vec u(n);
  for (Index i = 0; i < n; ++i) u[i] = std::sin(0.1 * i) + 0.3 * rng.normal();
  const Vec blurred = c.apply(u);
  // divide out the spectrum (lambda = 0 inverse filter)
  const CVec u_hat = fft(blurred).cwiseQuotient(c.spectrum());
  const Vec recovered = ifft_real(u_hat);
  CHECK((recovered - u).norm() <= 1e-8 * u.norm());
}

TEST_CASE("radon: central axis-aligned ray integrates the full column") {
  RadonSpec spec;
  spec.n = 16;
  spec.angles_deg = {0.0};
  spec.detector_count = 25;  // odd: t = 0 is bin 12
  auto op = make_radon(spec);
  const Vec ones = Vec::Constant(16 * 16, 1.0);
  const Vec proj = op->apply(ones);
  CHECK(std::abs(proj[12] - 16.0) <= 1e-9);
}

TEST_CASE("radon: point response is concentrated at 0 and 90 degrees") {
  RadonSpec spec;
  spec.n = 16;
  spec.angles_deg = {0.0, 90.0};
  spec.detector_count = 25;
  auto op = make_radon(spec);
  Vec img = Vec::Zero(16 * 16);
  img[5 * 16 + 9] = 1.0;  // single bright pixel
  const Vec proj = op->apply(img);
  for (int view = 0; view < 2; ++view) {
    const auto seg = proj.segment(view * 25, 25);
    Index argmax = 0;
    seg.maxCoeff(&argmax);
    double others = 0.0;
    for (Index i = 0; i < 25; ++i)
      if (i != argmax) others += seg[i];
    CHECK(seg[argmax] > 0.99);
    CHECK(others <= 1e-9);
  }
}

TEST_CASE("radon matrix is nonnegative with the documented shape") {
  RadonSpec spec;
  spec.n = 16;
  spec.angles_deg.clear();
  for (int a = 0; a < 18; ++a) spec.angles_deg.push_back(10.0 * a);
  spec.detector_count = 27;
  auto op = make_radon(spec);
  CHECK(op->rows() == 18 * 27);
  CHECK(op->cols() == 256);
  const Eigen::SparseMatrix<double>& m = op->matrix();
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      CHECK(it.value() >= 0.0);
  CHECK(oracles::adjoint_defect(*op, 100, 7) <= 1e-10);
}

TEST_CASE("fourier mask operator matches its complex definition") {
  const Index n = 16;
  const std::vector<Index> mask{0, 2, 3, 8, 13, 14};
  FourierMaskOperator op(n, mask, 1);
  Rng rng(31);
  const Vec x = gaussian_vector(rng, n);
  const CVec xf = fft(x);
  const Vec y = op.apply(x);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    CHECK(y[static_cast<Index>(i)] == doctest::Approx(xf[mask[i]].real()).epsilon(1e-12));
    CHECK(y[static_cast<Index>(i + mask.size())] ==
          doctest::Approx(xf[mask[i]].imag()).epsilon(1e-12));
  }
  CHECK_THROWS_AS(FourierMaskOperator(8, std::vector<Index>{1, 1, 2}, 1), std::invalid_argument);
  CHECK_THROWS_AS(FourierMaskOperator(8, std::vector<Index>{9}, 1), std::invalid_argument);
}
