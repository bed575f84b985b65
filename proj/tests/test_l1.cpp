#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "evidentsel/l1.hpp"
#include "evidentsel/operators.hpp"
#include "evidentsel/rng.hpp"
#include "evidentsel/signals.hpp"
#include "evidentsel/tikhonov.hpp"
#include "oracles.hpp"

using namespace evsel;

namespace {

double l1_objective(const Mat& a, const Mat& t, const Vec& b, double lambda_1, const Vec& u) {
  return (a * u - b).squaredNorm() + lambda_1 * (t * u).lpNorm<1>();
}

}  // namespace

TEST_CASE("l1 parameter map") {
  CHECK(map_to_l1(1.0, 1.0) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(map_to_l1(4.0, 2.0) == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-15));
  // homogeneity: (c sigma^2, sqrt(c) eta) scales the map by sqrt(c)
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const double s2 = std::exp(rng.uniform(-2.0, 2.0));
    const double eta = std::exp(rng.uniform(-2.0, 2.0));
    const double c = std::exp(rng.uniform(-2.0, 2.0));
    CHECK(map_to_l1(c * s2, std::sqrt(c) * eta) ==
          doctest::Approx(std::sqrt(c) * map_to_l1(s2, eta)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(map_to_l1(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("soft threshold") {
  Vec v(5);
  v << -3.0, -0.5, 0.0, 0.2, 2.0;
  const Vec s = shrink(v, 1.0);
  CHECK(s[0] == doctest::Approx(-2.0));
  CHECK(s[1] == 0.0);
  CHECK(s[2] == 0.0);
  CHECK(s[3] == 0.0);
  CHECK(s[4] == doctest::Approx(1.0));
  CHECK((shrink(v, 0.0) - v).norm() == 0.0);
  Rng rng(2);
  const Vec r = gaussian_vector(rng, 64);
  const Vec sr = shrink(r, 0.3);
  for (Index i = 0; i < 64; ++i) CHECK(std::abs(sr[i]) <= std::abs(r[i]));
}

TEST_CASE("lambda_1 = 0 reduces ADMM to least squares") {
  const Index n = 24;
  Rng rng(3);
  const Mat a = gaussian_matrix(rng, 32, n);
  DenseOperator a_op(a);
  FDRegularizer1D t(1, n);
  const Vec b = gaussian_vector(rng, 32);

  ADMMConfig cfg;
  cfg.max_iter = 2000;
  const L1Result res = solve_l1_admm(a_op, t, b, 0.0, cfg);
  const SolveResult ls = solve_cg(a_op, t, b, 0.0);
  CHECK((res.u - ls.u).norm() <= 1e-6 * std::max(1.0, ls.u.norm()));
}

TEST_CASE("huge threshold collapses total variation to the mean") {
  const Index n = 32;
  IdentityOperator a(n);
  FDRegularizer1D t(1, n);
  Rng rng(4);
  const Vec b = gaussian_vector(rng, n).array() + 2.0;
  ADMMConfig cfg;
  cfg.max_iter = 3000;
  const double lambda_big = 4.0 * (2.0 * b).lpNorm<Eigen::Infinity>() * n;
  const L1Result res = solve_l1_admm(a, t, b, lambda_big, cfg);
  const double mean = b.mean();
  CHECK((res.u.array() - mean).abs().maxCoeff() <= 1e-4);
}

TEST_CASE("n=3 ADMM objective matches the brute-force grid oracle") {
  const Index n = 3;
  Rng rng(5);
  Mat a = gaussian_matrix(rng, 4, n);
  DenseOperator a_op(a);
  FDRegularizer1D t(1, n);
  const Mat t_dense = materialize(t);
  const Vec b = gaussian_vector(rng, 4);
  const double lambda_1 = 0.7;

  ADMMConfig cfg;
  cfg.max_iter = 5000;
  cfg.abs_tol = 1e-9;
  cfg.rel_tol = 1e-7;
  const L1Result res = solve_l1_admm(a_op, t, b, lambda_1, cfg);
  REQUIRE(res.converged);
  const double obj_admm = l1_objective(a, t_dense, b, lambda_1, res.u);

  // coarse grid, then 1e-3 steps around the winner
  Vec best = Vec::Zero(n);
  double best_val = l1_objective(a, t_dense, b, lambda_1, best);
  for (double x = -2.0; x <= 2.0; x += 0.05)
    for (double y = -2.0; y <= 2.0; y += 0.05)
      for (double z = -2.0; z <= 2.0; z += 0.05) {
        Vec u(n);
        u << x, y, z;
        const double val = l1_objective(a, t_dense, b, lambda_1, u);
        if (val < best_val) {
          best_val = val;
          best = u;
        }
      }
  const Vec center = best;
  for (double dx = -0.06; dx <= 0.06; dx += 1e-3)
    for (double dy = -0.06; dy <= 0.06; dy += 1e-3)
      for (double dz = -0.06; dz <= 0.06; dz += 1e-3) {
        Vec u(n);
        u << center[0] + dx, center[1] + dy, center[2] + dz;
        const double val = l1_objective(a, t_dense, b, lambda_1, u);
        if (val < best_val) best_val = val;
      }

  CHECK(std::abs(obj_admm - best_val) <= 1e-4 * std::abs(best_val));
}

TEST_CASE("subgradient optimality at convergence") {
  const Index n = 64;
  Rng rng(6);
  const Vec u_true = gen_signal(SignalKind::Boxcar, n);
  const NoisySample sample = add_noise(u_true, 5.0, 6, SnrConvention::StddevOverSigma);
  IdentityOperator a(n);
  FDRegularizer1D t(1, n);
  const Mat t_dense = materialize(t);
  const double lambda_1 = 0.4;

  ADMMConfig cfg;
  cfg.max_iter = 4000;
  cfg.abs_tol = 1e-9;
  cfg.rel_tol = 1e-7;
  const L1Result res = solve_l1_admm(a, t, sample.noisy_b, lambda_1, cfg);
  REQUIRE(res.converged);

  // g = sign(z) off the threshold band; on the band (z exactly zero after
  // shrinkage) the dual variable certifies an admissible subgradient.
  Vec g(res.z.size());
  for (Index i = 0; i < res.z.size(); ++i) {
    if (res.z[i] > 0.0) g[i] = 1.0;
    else if (res.z[i] < 0.0) g[i] = -1.0;
    else g[i] = std::clamp(res.rho * res.w[i] / lambda_1, -1.0, 1.0);
  }
  const Vec resid = 2.0 * (res.u - sample.noisy_b) + lambda_1 * t_dense.transpose() * g;
  const double scale = (2.0 * sample.noisy_b).norm();
  CHECK(resid.norm() <= 1e-3 * scale);
}

TEST_CASE("objective never exceeds the zero-initialization objective") {
  const Index n = 40;
  Rng rng(7);
  const Mat a = gaussian_matrix(rng, 48, n);
  DenseOperator a_op(a);
  FDRegularizer1D t(1, n);
  const Mat t_dense = materialize(t);
  const Vec b = gaussian_vector(rng, 48);
  const double lambda_1 = 1.1;
  const L1Result res = solve_l1_admm(a_op, t, b, lambda_1, ADMMConfig{});
  CHECK(l1_objective(a, t_dense, b, lambda_1, res.u) <=
        l1_objective(a, t_dense, b, lambda_1, Vec::Zero(n)));
}

TEST_CASE("spectral ADMM agrees with the general path on a deconvolution") {
  const Index n = 48;
  const Vec psf = make_gaussian_psf(n, 1.2);
  const Vec u_true = gen_signal(SignalKind::Boxcar, n);
  CirculantOperator blur(psf);
  const NoisySample sample = add_noise(blur.apply(u_true), 8.0, 21,
                                       SnrConvention::StddevOverSigma);
  FDRegularizer1D t(1, n);
  const double lambda_1 = 0.05;

  ADMMConfig cfg;
  cfg.max_iter = 20000;
  cfg.abs_tol = 1e-8;
  cfg.rel_tol = 1e-6;
  const L1Result general = solve_l1_admm(blur, t, sample.noisy_b, lambda_1, cfg);
  const SpectralModel model = SpectralModel::deconvolve_1d(psf, 1);
  const L1Result spectral = solve_l1_admm_spectral(model, sample.noisy_b, lambda_1, cfg);
  REQUIRE(general.converged);
  REQUIRE(spectral.converged);
  CHECK((general.u - spectral.u).norm() <= 1e-3 * general.u.norm());
  CHECK(general.primal_residual.size() == static_cast<std::size_t>(general.iterations));
  CHECK(general.dual_residual.size() == general.primal_residual.size());
}
