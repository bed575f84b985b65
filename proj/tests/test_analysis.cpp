#include <doctest.h>

#include <cmath>

#include "evidentsel/analysis.hpp"
#include "evidentsel/dft.hpp"
#include "evidentsel/evidence.hpp"
#include "evidentsel/rng.hpp"
#include "evidentsel/signals.hpp"

using namespace evsel;

TEST_CASE("identity regularizer makes every lambda a fixed point") {
  const SpectralModel model = SpectralModel::denoise_custom(Vec::Ones(32));
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const CVec u_hat = fft(gaussian_vector(rng, 32));
    const double lambda = std::exp(rng.uniform(-6.0, 6.0));
    CHECK(fixpoint_f(model, u_hat, lambda) == lambda);  // exact
  }
  const FixedPointReport report = scan_fixed_points(model, fft(gaussian_vector(rng, 32)));
  CHECK(report.identity_regularizer);
}

TEST_CASE("zero is a fixed point") {
  const SpectralModel model = SpectralModel::denoise_1d(64, 2);
  Rng rng(2);
  const CVec u_hat = fft(gaussian_vector(rng, 64));
  CHECK(fixpoint_f(model, u_hat, 0.0) == 0.0);
}

TEST_CASE("one step of the diagonal algorithm equals fixpoint_f") {
  const Index n = 16;
  const SpectralModel model = SpectralModel::denoise_1d(n, 1);
  const Vec u = gen_signal(SignalKind::Boxcar, n);
  const NoisySample sample = add_noise(u, 4.0, 33, SnrConvention::StddevOverSigma);
  const CVec b_hat = fft(sample.noisy_b);

  for (double lambda0 : {1e-8, 1e-3, 0.4, 3.0, 200.0}) {
    MEOptions opts;
    opts.lambda0 = lambda0;
    opts.max_iter = 1;
    const SpectralMEResult result = me_iterate_spectral_hat(model, b_hat, opts);
    REQUIRE(result.trajectory.states.size() == 1);
    const double stepped = result.trajectory.states[0].lambda;
    const double mapped = fixpoint_f(model, b_hat, lambda0);
    CHECK(stepped == doctest::Approx(mapped).epsilon(1e-12));
  }
}

TEST_CASE("slope at zero matches central finite differences") {
  const Index n = 32;
  const SpectralModel model = SpectralModel::denoise_1d(n, 1);
  Rng rng(3);
  const CVec u_hat = fft(gaussian_vector(rng, n));
  const double slope = fixpoint_slope_at_zero(model, u_hat);
  const double h = 1e-6;
  const double fd = (fixpoint_f(model, u_hat, h) - 0.0) / h;  // f(0) = 0
  CHECK(slope == doctest::Approx(fd).epsilon(1e-4));
}

TEST_CASE("zero-stability switch between r=1 and r=2") {
  const Index n = 200;
  const Vec u = gen_signal(SignalKind::PiecewiseQuadratic, n);
  const NoisySample sample = add_noise(u, 100.0, 17, SnrConvention::StddevOverSigma);
  const CVec b_hat = fft(sample.noisy_b);

  const double slope_r1 = fixpoint_slope_at_zero(SpectralModel::denoise_1d(n, 1), b_hat);
  CHECK(slope_r1 < 1.0);  // regularization forfeited

  const double slope_r2 = fixpoint_slope_at_zero(SpectralModel::denoise_1d(n, 2), b_hat);
  CHECK(slope_r2 > 1.0);  // a positive stable fixed point exists instead
}

TEST_CASE("kappa_infinity: single-mode data attains its bounds") {
  const Index n = 32;
  const SpectralModel model = SpectralModel::denoise_1d(n, 1);

  CVec top = CVec::Zero(n);
  top[n / 2] = 1.0;  // |gamma|^2 = 4 there
  const KappaResult hi = kappa_infinity(model, top);
  CHECK(hi.kappa == doctest::Approx(4.0 / static_cast<double>(n - 1)).epsilon(1e-12));
  CHECK(hi.kappa == doctest::Approx(hi.upper).epsilon(1e-12));

  CVec low = CVec::Zero(n);
  low[1] = 1.0;
  const KappaResult lo = kappa_infinity(model, low);
  const double expected =
      4.0 * std::pow(std::sin(3.14159265358979323846 / n), 2) / static_cast<double>(n - 1);
  CHECK(lo.kappa == doctest::Approx(expected).epsilon(1e-12));
  CHECK(lo.kappa == doctest::Approx(lo.lower).epsilon(1e-12));
}

TEST_CASE("f grows like kappa lambda^2 and the bounds bracket kappa") {
  const Index n = 64;
  for (int r : {1, 2}) {
    const SpectralModel model = SpectralModel::denoise_1d(n, r);
    Rng rng(100 + r);
    const CVec u_hat = fft(gaussian_vector(rng, n));
    const KappaResult kappa = kappa_infinity(model, u_hat);
    CHECK(kappa.lower <= kappa.kappa);
    CHECK(kappa.kappa <= kappa.upper);
    const double lambda = 1e8;
    const double ratio = fixpoint_f(model, u_hat, lambda) / (lambda * lambda);
    CHECK(std::abs(ratio - kappa.kappa) <= 1e-3 * kappa.kappa);
    // paper-form bounds for the 1D circulant difference
    CHECK(kappa.kappa >= std::pow(4.0, r) *
                             std::pow(std::sin(3.14159265358979323846 / n), 2.0 * r) /
                             static_cast<double>(n - 1) * (1 - 1e-12));
    CHECK(kappa.kappa <= std::pow(4.0, r) / static_cast<double>(n - 1) * (1 + 1e-12));
  }
}

TEST_CASE("mean eigenvalue power identity (trapezoid-exact)") {
  const Index n = 64;
  for (int r : {1, 2, 3}) {
    const Vec t = fd_eigenvalues_sq(r, n);
    double expected = std::pow(4.0, r);
    for (int k = 2 * r - 1; k >= 1; k -= 2) expected *= k;        // (2r-1)!!
    for (int k = 2 * r; k >= 2; k -= 2) expected /= k;            // (2r)!!
    CHECK(t.sum() / static_cast<double>(n) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("boxcar r=2 scan finds the unstable-stable-unstable pattern") {
  const Index n = 256;
  const Vec u = gen_signal(SignalKind::Boxcar, n);
  const NoisySample sample = add_noise(u, 5.0, 4242, SnrConvention::StddevOverSigma);
  const SpectralModel model = SpectralModel::denoise_1d(n, 2);
  const CVec b_hat = fft(sample.noisy_b);

  const FixedPointReport report = scan_fixed_points(model, b_hat);
  REQUIRE(report.fixed_points.size() == 3);
  CHECK(report.fixed_points[0].lambda == 0.0);
  CHECK_FALSE(report.fixed_points[0].stable);
  CHECK(report.fixed_points[1].stable);
  CHECK_FALSE(report.fixed_points[2].stable);
  // interior points actually satisfy f(l) = l
  for (std::size_t i = 1; i < report.fixed_points.size(); ++i) {
    const double l = report.fixed_points[i].lambda;
    CHECK(std::abs(fixpoint_f(model, b_hat, l) - l) <= 1e-5 * std::max(l, 1.0));
  }
  // the large unstable point sits near 1/kappa
  CHECK(report.fixed_points[2].lambda ==
        doctest::Approx(1.0 / report.kappa_inf).epsilon(0.5));

  // the iteration lands on the middle fixed point from any sane start
  const double target = report.fixed_points[1].lambda;
  for (double lambda0 : {1e-2, 1.0, 1e2}) {
    MEOptions opts;
    opts.lambda0 = lambda0;
    opts.max_iter = 200;
    opts.tol = 1e-10;
    const SpectralMEResult run = me_iterate_spectral_hat(model, b_hat, opts);
    CHECK(run.trajectory.final_lambda() == doctest::Approx(target).epsilon(1e-3));
  }
}

TEST_CASE("converged iterate is a fixed point of f") {
  // the solution-change/lambda-change sensitivity is fixture dependent; the
  // 10 * tol bound is calibrated at SNR = 2 (it loosens at high SNR)
  const Index n = 128;
  const Vec u = gen_signal(SignalKind::Boxcar, n);
  const NoisySample sample = add_noise(u, 2.0, 7, SnrConvention::StddevOverSigma);
  const CVec b_hat = fft(sample.noisy_b);
  for (int r : {1, 2}) {
    const SpectralModel model = SpectralModel::denoise_1d(n, r);
    MEOptions opts;
    opts.tol = 1e-8;
    opts.max_iter = 500;
    const SpectralMEResult run = me_iterate_spectral_hat(model, b_hat, opts);
    REQUIRE(run.trajectory.converged);
    const double lambda_star = run.trajectory.final_lambda();
    CHECK(std::abs(fixpoint_f(model, b_hat, lambda_star) - lambda_star) <=
          10 * opts.tol * lambda_star);
  }
}

TEST_CASE("degenerate data on the null space is reported") {
  const SpectralModel model = SpectralModel::denoise_1d(32, 1);
  CVec dc = CVec::Zero(32);
  dc[0] = 5.0;  // constant signal: T u = 0
  CHECK_THROWS_AS(fixpoint_f(model, dc, 1.0), std::domain_error);
  CHECK_THROWS_AS(fixpoint_slope_at_zero(model, dc), std::domain_error);
  CHECK_THROWS_AS(kappa_infinity(model, dc), std::domain_error);
}
