#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "evidentsel/analysis.hpp"
#include "evidentsel/dft.hpp"
#include "evidentsel/evidence.hpp"
#include "evidentsel/l1.hpp"
#include "evidentsel/operators.hpp"
#include "evidentsel/signals.hpp"
#include "evidentsel/spectral.hpp"
#include "evidentsel/tikhonov.hpp"
#include "evidentsel/upre.hpp"

namespace py = pybind11;
using namespace evsel;

namespace {

SnrConvention convention_from(const std::string& name) {
  if (name == "stddev") return SnrConvention::StddevOverSigma;
  if (name == "mean") return SnrConvention::MeanOverSigma;
  throw std::invalid_argument("snr convention must be 'stddev' or 'mean'");
}

MEOptions me_options(double lambda0, int max_iter, double tol, int probes, std::uint64_t seed) {
  MEOptions opts;
  opts.lambda0 = lambda0;
  opts.max_iter = max_iter;
  opts.tol = tol;
  opts.probe_count = probes;
  opts.seed = seed;
  return opts;
}

std::string stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::Tol: return "tol";
    case StopReason::MaxIter: return "max_iter";
    case StopReason::Divergence: return "divergence";
  }
  return "unknown";
}

LinearProblem dense_problem(const Mat& a, const Vec& b, int reg_order) {
  LinearProblem problem;
  problem.A = std::make_shared<DenseOperator>(a);
  problem.T = make_fd_regularizer({reg_order, a.cols(), 1});
  problem.b = b;
  return problem;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Evidence-maximizing regularization parameter selection for "
            "Tikhonov and l1 inverse problems.";

  // ---- signals / harness ----
  m.def(
      "gen_signal",
      [](const std::string& kind, Index n) { return gen_signal(signal_kind_from_name(kind), n); },
      py::arg("kind"), py::arg("n"),
      "Canonical test signal: 'boxcar', 'hat', 'sine', or 'pquad'.");
  m.def("shepp_logan", &shepp_logan, py::arg("n"));
  m.def("blocks_phantom", &blocks_phantom, py::arg("n"));
  m.def(
      "add_noise",
      [](const Vec& clean, double snr, std::uint64_t seed, const std::string& convention) {
        const NoisySample s = add_noise(clean, snr, seed, convention_from(convention));
        return py::make_tuple(s.noisy_b, s.true_sigma);
      },
      py::arg("clean"), py::arg("snr"), py::arg("seed") = 0,
      py::arg("convention") = "stddev",
      "Returns (noisy, sigma); convention 'stddev' (1D) or 'mean' (images).");
  m.def("relative_error", &relative_error, py::arg("u"), py::arg("v"));
  m.def("make_gaussian_psf", &make_gaussian_psf, py::arg("n"), py::arg("omega"));
  m.def("make_gaussian_psf_2d", &make_gaussian_psf_2d, py::arg("n"), py::arg("omega"));

  // ---- spectral machinery ----
  m.def("fd_eigenvalues", &fd_eigenvalues, py::arg("order"), py::arg("n"));
  m.def("fd_eigenvalues_sq", &fd_eigenvalues_sq, py::arg("order"), py::arg("n"));
  m.def("circulant_eigenvalues", &circulant_eigenvalues, py::arg("first_column"));

  py::class_<SpectralModel>(m, "SpectralModel")
      .def_static("denoise_1d", &SpectralModel::denoise_1d, py::arg("n"), py::arg("reg_order"))
      .def_static("denoise_2d", &SpectralModel::denoise_2d, py::arg("n"), py::arg("reg_order"))
      .def_static("denoise_custom", &SpectralModel::denoise_custom, py::arg("reg_eigs_sq"))
      .def_static("deconvolve_1d", &SpectralModel::deconvolve_1d, py::arg("psf_first_column"),
                  py::arg("reg_order"))
      .def_static("deconvolve_2d", &SpectralModel::deconvolve_2d, py::arg("psf_kernel"),
                  py::arg("reg_order"))
      .def_static("fourier_mask_1d", &SpectralModel::fourier_mask_1d, py::arg("n"),
                  py::arg("mask"), py::arg("reg_order"))
      .def_static("fourier_mask_2d", &SpectralModel::fourier_mask_2d, py::arg("n"),
                  py::arg("mask"), py::arg("reg_order"))
      .def_readonly("dims", &SpectralModel::dims)
      .def_readonly("n", &SpectralModel::n)
      .def_readonly("n_total", &SpectralModel::n_total)
      .def_readonly("m", &SpectralModel::m)
      .def_readonly("reg_order", &SpectralModel::reg_order)
      .def_readonly("forward_eigs_sq", &SpectralModel::forward_eigs_sq)
      .def_readonly("reg_eigs_sq", &SpectralModel::reg_eigs_sq);

  m.def(
      "spectral_traces",
      [](const SpectralModel& model, double lam) {
        const SpectralTraces tr = spectral_traces(model, lam);
        return py::make_tuple(tr.trace_a, tr.trace_t);
      },
      py::arg("model"), py::arg("lambda_"),
      "(trace(H^-1 A^T A), trace(H^-1 T^T T)) as exact diagonal sums.");
  m.def(
      "solve_tikhonov_spectral",
      [](const SpectralModel& model, const Vec& b, double lam) {
        return spectral_inverse_transform(model,
                                          spectral_solve(model, spectral_data_transform(model, b), lam));
      },
      py::arg("model"), py::arg("b"), py::arg("lambda_"),
      "Diagonal (Wiener-form) Tikhonov solution in the spatial domain.");

  // ---- Tikhonov / CG ----
  m.def(
      "solve_tikhonov_dense",
      [](const Mat& a, const Vec& b, int reg_order, double lam, double rel_tol) {
        DenseOperator a_op(a);
        const auto t = make_fd_regularizer({reg_order, a.cols(), 1});
        CGConfig cfg;
        cfg.rel_tol = rel_tol;
        const SolveResult res = solve_cg(a_op, *t, b, lam, cfg);
        return py::make_tuple(res.u, res.iterations, res.converged);
      },
      py::arg("a"), py::arg("b"), py::arg("reg_order"), py::arg("lambda_"),
      py::arg("rel_tol") = 1e-8,
      "CG on the normal equations; returns (u, iterations, converged).");

  // ---- evidence maximization ----
  py::class_<MEState>(m, "MEState")
      .def_readonly("k", &MEState::k)
      .def_readonly("sigma_sq", &MEState::sigma_sq)
      .def_readonly("eta_sq", &MEState::eta_sq)
      .def_readonly("lambda_", &MEState::lambda)
      .def("__repr__", [](const MEState& s) {
        return "MEState(k=" + std::to_string(s.k) + ", lambda=" + std::to_string(s.lambda) + ")";
      });

  py::class_<METrajectory>(m, "METrajectory")
      .def_readonly("lambda0", &METrajectory::lambda0)
      .def_readonly("states", &METrajectory::states)
      .def_readonly("solution_change", &METrajectory::solution_change)
      .def_readonly("converged", &METrajectory::converged)
      .def_property_readonly(
          "stop_reason", [](const METrajectory& t) { return stop_reason_name(t.stop_reason); })
      .def_property_readonly("final_lambda", &METrajectory::final_lambda)
      .def_property_readonly("final_sigma", &METrajectory::final_sigma)
      .def_property_readonly("final_eta", &METrajectory::final_eta)
      .def_property_readonly("iterations", &METrajectory::iterations);

  m.def(
      "me_select_spectral",
      [](const SpectralModel& model, const Vec& b, double lambda0, int max_iter, double tol) {
        const SpectralMEResult result =
            me_iterate_spectral(model, b, me_options(lambda0, max_iter, tol, 32, 0));
        return py::make_tuple(result.trajectory, result.u);
      },
      py::arg("model"), py::arg("b"), py::arg("lambda0") = 1.0, py::arg("max_iter") = 30,
      py::arg("tol") = 1e-4,
      "Diagonal fast path; returns (trajectory, solution at the final lambda).");
  m.def(
      "me_select_general",
      [](const Mat& a, const Vec& b, int reg_order, double lambda0, int max_iter, double tol,
         int probes, std::uint64_t seed) {
        const LinearProblem problem = dense_problem(a, b, reg_order);
        const METrajectory traj =
            me_iterate_general(problem, me_options(lambda0, max_iter, tol, probes, seed));
        return traj;
      },
      py::arg("a"), py::arg("b"), py::arg("reg_order") = 1, py::arg("lambda0") = 1.0,
      py::arg("max_iter") = 30, py::arg("tol") = 1e-4, py::arg("probes") = 32,
      py::arg("seed") = 0,
      "General path (CG + corrected Hutchinson traces) for a dense operator.");

  // ---- l1 ----
  m.def("map_to_l1", &map_to_l1, py::arg("sigma_sq"), py::arg("eta"),
        "lambda_1 = 2^(3/2) sigma^2 / eta.");
  m.def(
      "solve_l1_spectral",
      [](const SpectralModel& model, const Vec& b, double lambda_1, double rho, int max_iter) {
        ADMMConfig cfg;
        cfg.rho = rho;
        cfg.max_iter = max_iter;
        const L1Result res = solve_l1_admm_spectral(model, b, lambda_1, cfg);
        return py::make_tuple(res.u, res.iterations, res.converged);
      },
      py::arg("model"), py::arg("b"), py::arg("lambda_1"), py::arg("rho") = 0.0,
      py::arg("max_iter") = 2000,
      "ADMM with the diagonal u-update; returns (u, iterations, converged).");
  m.def(
      "solve_l1_dense",
      [](const Mat& a, const Vec& b, int reg_order, double lambda_1, double rho, int max_iter) {
        DenseOperator a_op(a);
        const auto t = make_fd_regularizer({reg_order, a.cols(), 1});
        ADMMConfig cfg;
        cfg.rho = rho;
        cfg.max_iter = max_iter;
        const L1Result res = solve_l1_admm(a_op, *t, b, lambda_1, cfg);
        return py::make_tuple(res.u, res.iterations, res.converged);
      },
      py::arg("a"), py::arg("b"), py::arg("reg_order"), py::arg("lambda_1"), py::arg("rho") = 0.0,
      py::arg("max_iter") = 2000);

  // ---- UPRE ----
  m.def(
      "upre_select_spectral",
      [](const SpectralModel& model, const Vec& b, double sigma_sq, double lambda_min,
         double lambda_max, int coarse, int refine) {
        UPREGrid grid;
        grid.lambda_min = lambda_min;
        grid.lambda_max = lambda_max;
        grid.coarse_count = coarse;
        grid.refine_count = refine;
        const UPRESelection sel = upre_select_spectral(model, b, sigma_sq, grid);
        return py::make_tuple(sel.lambda, sel.objective, sel.boundary);
      },
      py::arg("model"), py::arg("b"), py::arg("sigma_sq"), py::arg("lambda_min") = 1e-4,
      py::arg("lambda_max") = 1e4, py::arg("coarse") = 20, py::arg("refine") = 20,
      "Coarse+refined log-grid UPRE argmin; returns (lambda, objective, boundary_flag).");

  // ---- fixed-point analysis (denoising) ----
  m.def(
      "fixpoint_f",
      [](const SpectralModel& model, const Vec& data, double lam) {
        return fixpoint_f(model, spectral_data_transform(model, data), lam);
      },
      py::arg("model"), py::arg("data"), py::arg("lambda_"));
  m.def(
      "fixpoint_slope_at_zero",
      [](const SpectralModel& model, const Vec& data) {
        return fixpoint_slope_at_zero(model, spectral_data_transform(model, data));
      },
      py::arg("model"), py::arg("data"));
  m.def(
      "kappa_infinity",
      [](const SpectralModel& model, const Vec& data) {
        const KappaResult k = kappa_infinity(model, spectral_data_transform(model, data));
        return py::make_tuple(k.kappa, k.lower, k.upper);
      },
      py::arg("model"), py::arg("data"));
  m.def(
      "scan_fixed_points",
      [](const SpectralModel& model, const Vec& data, double lambda_min, double lambda_max,
         int points) {
        ScanOptions opts;
        opts.lambda_min = lambda_min;
        opts.lambda_max = lambda_max;
        opts.points = points;
        const FixedPointReport report =
            scan_fixed_points(model, spectral_data_transform(model, data), opts);
        py::list fixed_points;
        for (const FixedPoint& fp : report.fixed_points)
          fixed_points.append(py::make_tuple(fp.lambda, fp.stable, fp.slope));
        py::dict out;
        out["fixed_points"] = fixed_points;
        out["slope_at_zero"] = report.slope_at_zero;
        out["kappa_inf"] = report.kappa_inf;
        out["kappa_bounds"] = report.kappa_bounds;
        out["identity_regularizer"] = report.identity_regularizer;
        return out;
      },
      py::arg("model"), py::arg("data"), py::arg("lambda_min") = 1e-6,
      py::arg("lambda_max") = 0.0, py::arg("points") = 400,
      "Fixed points of the denoising map with stability verdicts.");
}
