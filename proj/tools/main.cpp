// evidentsel CLI: fixture generation, evidence-maximizing parameter
// selection, l2/l1 reconstruction, UPRE baseline, fixed-point diagnostics,
// and the benchmark runner.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "evidentsel/analysis.hpp"
#include "evidentsel/bench.hpp"
#include "evidentsel/dft.hpp"
#include "evidentsel/evidence.hpp"
#include "evidentsel/io.hpp"
#include "evidentsel/l1.hpp"
#include "evidentsel/operators.hpp"
#include "evidentsel/signals.hpp"
#include "evidentsel/upre.hpp"

using namespace evsel;

namespace {

std::uint64_t env_seed_or(std::uint64_t fallback) {
  if (const char* env = std::getenv("EVIDENTSEL_SEED")) return std::strtoull(env, nullptr, 10);
  return fallback;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct LoadedData {
  Vec values;      // flattened row-major for images
  Index side = 0;  // image side; 0 for 1D
  bool is_image() const { return side > 0; }
};

LoadedData load_data(const std::string& path) {
  LoadedData data;
  if (ends_with(path, ".pgm")) {
    const Mat img = read_pgm16(path, default_sidecar_path(path));
    if (img.rows() != img.cols())
      throw std::runtime_error("expected a square image in " + path);
    data.side = img.rows();
    data.values.resize(img.size());
    for (Index r = 0; r < img.rows(); ++r)
      for (Index c = 0; c < img.cols(); ++c) data.values[r * img.cols() + c] = img(r, c);
  } else if (ends_with(path, ".evf")) {
    const EvfArray arr = read_evf(path);
    data.values = arr.data;
    if (arr.rank == 2 && arr.dims[1] > 1) {
      if (arr.dims[0] != arr.dims[1])
        throw std::runtime_error("expected a square image in " + path);
      data.side = arr.dims[0];
    }
  } else {
    data.values = read_signal_csv(path);
  }
  return data;
}

void save_data(const std::string& path, const Vec& values, Index side) {
  if (ends_with(path, ".pgm")) {
    if (side == 0) throw std::runtime_error("cannot write 1D data as PGM: " + path);
    Mat img(side, side);
    for (Index r = 0; r < side; ++r)
      for (Index c = 0; c < side; ++c) img(r, c) = values[r * side + c];
    write_pgm16(path, img, default_sidecar_path(path));
  } else if (ends_with(path, ".evf")) {
    if (side > 0) {
      Mat img(side, side);
      for (Index r = 0; r < side; ++r)
        for (Index c = 0; c < side; ++c) img(r, c) = values[r * side + c];
      write_evf(path, img);
    } else {
      write_evf(path, values);
    }
  } else {
    write_signal_csv(path, values);
  }
}

struct ProblemFlags {
  std::string problem = "denoise";  // denoise | deconvolve | fourier-mask
  double omega = 1.0;
  int reg_order = 1;
  std::string data_path;
  std::string mask_path;  // fourier-mask index list (one index per row)

  void attach(CLI::App* cmd, bool with_mask = true) {
    cmd->add_option("--data", data_path, "input data (csv 1D, pgm image, evf)")->required();
    cmd->add_option("--problem", problem, "denoise | deconvolve | fourier-mask")
        ->check(CLI::IsMember({"denoise", "deconvolve", "fourier-mask"}));
    cmd->add_option("--omega", omega, "Gaussian PSF stddev in pixels (deconvolve)");
    cmd->add_option("--reg-order", reg_order, "finite-difference order r")->check(CLI::PositiveNumber);
    if (with_mask) cmd->add_option("--mask", mask_path, "DFT row index list (csv) for fourier-mask");
  }
};

std::vector<Index> load_mask(const std::string& path) {
  const auto rows = read_csv(path);
  std::vector<Index> mask;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].empty()) continue;
    try {
      mask.push_back(static_cast<Index>(std::stol(rows[i][0])));
    } catch (...) {
      if (i == 0) continue;  // header row
      throw;
    }
  }
  return mask;
}

struct BuiltProblem {
  SpectralModel model;                 // valid unless general-only
  CVec b_hat;                          // embedded for masks
  LinearProblem general;               // operators for the general path
  Index side = 0;
  bool spectral_ok = true;
};

BuiltProblem build_problem(const ProblemFlags& flags) {
  BuiltProblem built;
  const LoadedData data = load_data(flags.data_path);
  built.side = data.side;
  const int dims = data.is_image() ? 2 : 1;
  const Index n = data.is_image() ? data.side : data.values.size();

  if (flags.problem == "denoise") {
    built.model = (dims == 1) ? SpectralModel::denoise_1d(n, flags.reg_order)
                              : SpectralModel::denoise_2d(n, flags.reg_order);
    built.b_hat = spectral_data_transform(built.model, data.values);
    built.general.A = std::make_shared<IdentityOperator>(built.model.n_total);
  } else if (flags.problem == "deconvolve") {
    if (dims == 1) {
      const Vec psf = make_gaussian_psf(n, flags.omega);
      built.model = SpectralModel::deconvolve_1d(psf, flags.reg_order);
      built.general.A = std::make_shared<CirculantOperator>(psf);
    } else {
      const Mat psf = make_gaussian_psf_2d(n, flags.omega);
      built.model = SpectralModel::deconvolve_2d(psf, flags.reg_order);
      built.general.A = std::make_shared<Circulant2DOperator>(psf);
    }
    built.b_hat = spectral_data_transform(built.model, data.values);
  } else {  // fourier-mask: data rows are re,im pairs aligned with the mask
    if (flags.mask_path.empty())
      throw std::runtime_error("fourier-mask problems need --mask");
    const std::vector<Index> mask = load_mask(flags.mask_path);
    const auto rows = read_csv(flags.data_path);
    CVec b(static_cast<Index>(rows.size() - 1));
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].size() < 2) throw std::runtime_error("mask data rows need re,im columns");
      b[static_cast<Index>(i - 1)] =
          Complex(std::stod(rows[i][0]), std::stod(rows[i][1]));
    }
    // infer the signal length: 1D of length = max(mask)+1 rounded up by caller
    throw std::runtime_error(
        "fourier-mask via CLI expects --n; use `select --problem fourier-mask --n N`");
  }
  built.general.T =
      make_fd_regularizer({flags.reg_order, n, dims});
  built.general.b = data.values;
  return built;
}

int cmd_gen(const std::string& signal, const std::string& image, Index n, double snr,
            double blur, std::uint64_t seed, const std::string& out,
            const std::string& data_out) {
  Vec truth;
  Index side = 0;
  if (!image.empty()) {
    Mat img;
    if (image == "shepp") img = shepp_logan(n);
    else if (image == "blocks") img = blocks_phantom(n);
    else throw std::runtime_error("unknown built-in image: " + image);
    side = n;
    truth.resize(n * n);
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c) truth[r * n + c] = img(r, c);
  } else {
    truth = gen_signal(signal_kind_from_name(signal), n);
  }
  if (!out.empty()) save_data(out, truth, side);

  if (!data_out.empty()) {
    Vec clean = truth;
    if (blur > 0.0) {
      if (side > 0) {
        Circulant2DOperator c(make_gaussian_psf_2d(side, blur));
        clean = c.apply(clean);
      } else {
        CirculantOperator c(make_gaussian_psf(truth.size(), blur));
        clean = c.apply(clean);
      }
    }
    Vec noisy = clean;
    double sigma = 0.0;
    if (snr > 0.0) {
      const NoisySample sample =
          add_noise(clean, snr, env_seed_or(seed),
                    side > 0 ? SnrConvention::MeanOverSigma : SnrConvention::StddevOverSigma);
      noisy = sample.noisy_b;
      sigma = sample.true_sigma;
    }
    save_data(data_out, noisy, side);
    std::printf("wrote %s (sigma=%.17g)\n", data_out.c_str(), sigma);
  }
  return 0;
}

MEOptions me_options_from(double lambda0, double tol, int max_iter, int probes,
                          std::uint64_t seed) {
  MEOptions opts;
  opts.lambda0 = lambda0;
  opts.tol = tol;
  opts.max_iter = max_iter;
  opts.probe_count = probes;
  opts.seed = env_seed_or(seed);
  return opts;
}

const char* stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::Tol: return "tol";
    case StopReason::MaxIter: return "max_iter";
    case StopReason::Divergence: return "divergence";
  }
  return "unknown";
}

void print_trajectory_summary(const METrajectory& traj) {
  if (traj.states.empty()) {
    std::printf("no updates recorded (stop: %s)\n", stop_reason_name(traj.stop_reason));
    return;
  }
  const MEState& s = traj.final_state();
  std::printf("sigma=%.10g eta=%.10g lambda=%.10g iterations=%d converged=%d stop=%s\n",
              std::sqrt(s.sigma_sq), std::sqrt(s.eta_sq), s.lambda, traj.iterations(),
              traj.converged ? 1 : 0, stop_reason_name(traj.stop_reason));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evidence-maximizing regularization parameter selection"};
  app.require_subcommand(1);

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "emit problem fixtures");
  std::string gen_signal_name, gen_image, gen_out, gen_data_out;
  Index gen_n = 256;
  double gen_snr = 0.0, gen_blur = 0.0;
  std::uint64_t gen_seed = 0;
  gen->add_option("--signal", gen_signal_name, "boxcar | hat | sine | pquad");
  gen->add_option("--image", gen_image, "built-in image (shepp)");
  gen->add_option("--n", gen_n, "signal length / image side")->check(CLI::PositiveNumber);
  gen->add_option("--snr", gen_snr, "add noise at this SNR (omit for clean)");
  gen->add_option("--blur", gen_blur, "blur with a Gaussian PSF of this stddev first");
  gen->add_option("--seed", gen_seed, "noise seed (EVIDENTSEL_SEED overrides)");
  gen->add_option("--out", gen_out, "truth/clean output (csv, pgm, evf)");
  gen->add_option("--data-out", gen_data_out, "noisy data output");

  // ---- select ----
  auto* select = app.add_subcommand("select", "ME parameter selection");
  ProblemFlags select_flags;
  select_flags.attach(select);
  std::string select_mode = "spectral";
  double select_lambda0 = 1.0, select_tol = 1e-4;
  int select_max_iter = 30, select_probes = 32;
  std::uint64_t select_seed = 0;
  Index select_mask_n = 0;
  std::string select_traj_out;
  select->add_option("--mode", select_mode, "general | spectral")
      ->check(CLI::IsMember({"general", "spectral"}));
  select->add_option("--lambda0", select_lambda0, "initial lambda")->check(CLI::PositiveNumber);
  select->add_option("--tol", select_tol, "relative solution-change tolerance");
  select->add_option("--max-iter", select_max_iter, "outer iteration cap");
  select->add_option("--probes", select_probes, "Hutchinson probe count (general mode)");
  select->add_option("--seed", select_seed, "probe seed (EVIDENTSEL_SEED overrides)");
  select->add_option("--n", select_mask_n, "signal length (fourier-mask only)");
  select->add_option("--traj-out", select_traj_out, "trajectory CSV path");

  // ---- solve ----
  auto* solve = app.add_subcommand("solve", "reconstruct at a fixed or auto-selected lambda");
  ProblemFlags solve_flags;
  solve_flags.attach(solve, /*with_mask=*/false);
  std::string solve_reg = "l2", solve_out;
  double solve_lambda = -1.0;
  bool solve_auto = false;
  std::string solve_mode = "spectral";
  double solve_rho = 0.0;
  int solve_admm_iters = 500;
  double solve_lambda0 = 1.0, solve_tol = 1e-4;
  int solve_max_iter = 30, solve_probes = 32;
  std::uint64_t solve_seed = 0;
  solve->add_option("--reg", solve_reg, "l2 | l1")->check(CLI::IsMember({"l2", "l1"}));
  solve->add_option("--lambda", solve_lambda, "regularization parameter");
  solve->add_flag("--auto", solve_auto, "select lambda by ME first");
  solve->add_option("--mode", solve_mode, "general | spectral (auto selection)")
      ->check(CLI::IsMember({"general", "spectral"}));
  solve->add_option("--rho", solve_rho, "ADMM penalty (default: lambda_1)");
  solve->add_option("--admm-iters", solve_admm_iters, "ADMM iteration cap");
  solve->add_option("--lambda0", solve_lambda0, "ME initial lambda (--auto)");
  solve->add_option("--tol", solve_tol, "ME tolerance (--auto)");
  solve->add_option("--max-iter", solve_max_iter, "ME iteration cap (--auto)");
  solve->add_option("--probes", solve_probes, "probe count (--auto, general)");
  solve->add_option("--seed", solve_seed, "probe seed");
  solve->add_option("--out", solve_out, "solution output path")->required();

  // ---- upre ----
  auto* upre = app.add_subcommand("upre", "UPRE parameter selection (known sigma)");
  ProblemFlags upre_flags;
  upre_flags.attach(upre, /*with_mask=*/false);
  double upre_sigma = 0.0;
  UPREGrid upre_grid;
  upre->add_option("--sigma", upre_sigma, "noise standard deviation")->required();
  upre->add_option("--lambda-min", upre_grid.lambda_min, "grid lower end");
  upre->add_option("--lambda-max", upre_grid.lambda_max, "grid upper end");
  upre->add_option("--grid", upre_grid.coarse_count, "coarse grid size");
  upre->add_option("--refine", upre_grid.refine_count, "refinement grid size");

  // ---- fixpoint ----
  auto* fixpoint = app.add_subcommand("fixpoint", "fixed-point scan of the denoising map");
  std::string fp_data, fp_out;
  int fp_reg_order = 1, fp_points = 400;
  double fp_lambda_min = 1e-6, fp_lambda_max = 0.0;
  fixpoint->add_option("--data", fp_data, "input data (csv or pgm)")->required();
  fixpoint->add_option("--reg-order", fp_reg_order, "finite-difference order r");
  fixpoint->add_option("--points", fp_points, "scan grid size");
  fixpoint->add_option("--lambda-min", fp_lambda_min, "scan lower end");
  fixpoint->add_option("--lambda-max", fp_lambda_max, "scan upper end (0: 10/kappa)");
  fixpoint->add_option("--out", fp_out, "scan CSV output");

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "config-file driven benchmark trials");
  std::string bench_config, bench_out_override;
  bool bench_paper_scale = false;
  int bench_threads = 0;
  bench->add_option("--config", bench_config, "flat key=value config file")->required();
  bench->add_option("--out", bench_out_override, "override the config's output path");
  bench->add_flag("--paper-scale", bench_paper_scale, "run the paper-sized suites");
  bench->add_option("--threads", bench_threads, "worker thread cap");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      return cmd_gen(gen_signal_name, gen_image, gen_n, gen_snr, gen_blur, gen_seed, gen_out,
                     gen_data_out);
    }

    if (*select) {
      const MEOptions opts = me_options_from(select_lambda0, select_tol, select_max_iter,
                                             select_probes, select_seed);
      METrajectory traj;
      if (select_flags.problem == "fourier-mask") {
        if (select_mask_n <= 0 || select_flags.mask_path.empty())
          throw std::runtime_error("fourier-mask selection needs --n and --mask");
        const std::vector<Index> mask = load_mask(select_flags.mask_path);
        const SpectralModel model =
            SpectralModel::fourier_mask_1d(select_mask_n, mask, select_flags.reg_order);
        const auto rows = read_csv(select_flags.data_path);
        CVec b(static_cast<Index>(rows.size() - 1));
        for (std::size_t i = 1; i < rows.size(); ++i)
          b[static_cast<Index>(i - 1)] =
              Complex(std::stod(rows[i][0]), std::stod(rows[i][1]));
        traj = me_iterate_spectral_hat(model, embed_mask_data(model, b), opts).trajectory;
      } else {
        const BuiltProblem built = build_problem(select_flags);
        if (select_mode == "spectral") {
          traj = me_iterate_spectral_hat(built.model, built.b_hat, opts).trajectory;
        } else {
          traj = me_iterate_general(built.general, opts);
        }
      }
      print_trajectory_summary(traj);
      if (!select_traj_out.empty()) write_trajectory_csv(select_traj_out, traj);
      return traj.states.empty() ? 1 : 0;
    }

    if (*solve) {
      const BuiltProblem built = build_problem(solve_flags);
      double lambda = solve_lambda;
      double sigma_sq = 0.0, eta = 0.0;
      if (solve_auto) {
        const MEOptions opts =
            me_options_from(solve_lambda0, solve_tol, solve_max_iter, solve_probes, solve_seed);
        const METrajectory traj =
            solve_mode == "spectral"
                ? me_iterate_spectral_hat(built.model, built.b_hat, opts).trajectory
                : me_iterate_general(built.general, opts);
        if (traj.states.empty()) throw std::runtime_error("ME selection failed to produce a state");
        lambda = traj.final_lambda();
        sigma_sq = traj.final_state().sigma_sq;
        eta = traj.final_eta();
        print_trajectory_summary(traj);
      } else if (lambda < 0.0) {
        throw std::runtime_error("solve needs --lambda or --auto");
      }

      Vec u;
      if (solve_reg == "l2") {
        u = spectral_inverse_transform(built.model,
                                       spectral_solve(built.model, built.b_hat, lambda));
        std::printf("l2 solve at lambda=%.10g\n", lambda);
      } else {
        double lambda_1 = lambda;
        if (solve_auto) {
          lambda_1 = map_to_l1(sigma_sq, eta);
          std::printf("l1 map: lambda_1=%.10g\n", lambda_1);
        }
        ADMMConfig admm;
        admm.rho = solve_rho;
        admm.max_iter = solve_admm_iters;
        const L1Result res = solve_l1_admm_spectral(built.model, built.general.b, lambda_1, admm);
        std::printf("l1 ADMM: iterations=%d converged=%d\n", res.iterations,
                    res.converged ? 1 : 0);
        u = res.u;
      }
      save_data(solve_out, u, built.side);
      return 0;
    }

    if (*upre) {
      const BuiltProblem built = build_problem(upre_flags);
      const UPRESelection sel =
          upre_select_spectral_hat(built.model, built.b_hat, upre_sigma * upre_sigma, upre_grid);
      std::printf("lambda=%.10g objective=%.10g boundary=%d\n", sel.lambda, sel.objective,
                  sel.boundary ? 1 : 0);
      return 0;
    }

    if (*fixpoint) {
      const LoadedData data = load_data(fp_data);
      const int dims = data.is_image() ? 2 : 1;
      const Index n = data.is_image() ? data.side : data.values.size();
      const SpectralModel model = (dims == 1) ? SpectralModel::denoise_1d(n, fp_reg_order)
                                              : SpectralModel::denoise_2d(n, fp_reg_order);
      const CVec u_hat = spectral_data_transform(model, data.values);
      ScanOptions scan;
      scan.lambda_min = fp_lambda_min;
      scan.lambda_max = fp_lambda_max;
      scan.points = fp_points;
      const FixedPointReport report = scan_fixed_points(model, u_hat, scan);
      if (report.identity_regularizer) {
        std::printf("identity regularizer: every lambda is a fixed point\n");
        return 0;
      }
      std::printf("slope_at_zero=%.10g kappa_inf=%.10g bounds=[%.10g, %.10g]\n",
                  report.slope_at_zero, report.kappa_inf, report.kappa_bounds.first,
                  report.kappa_bounds.second);
      for (const FixedPoint& fp : report.fixed_points)
        std::printf("fixed_point lambda=%.10g stable=%d slope=%.6g\n", fp.lambda,
                    fp.stable ? 1 : 0, fp.slope);
      if (!fp_out.empty()) write_fixpoint_csv(fp_out, report);
      return 0;
    }

    if (*bench) {
      BenchConfig cfg = parse_bench_config(bench_config);
      cfg.paper_scale = bench_paper_scale;
      if (bench_threads > 0) cfg.threads = bench_threads;
      if (!bench_out_override.empty()) cfg.out_path = bench_out_override;
      if (const char* env = std::getenv("EVIDENTSEL_SEED"))
        cfg.seed = std::strtoull(env, nullptr, 10);
      const auto records = run_bench(cfg);
      if (cfg.out_path.empty()) throw std::runtime_error("bench config needs an `out` path");
      write_trials_csv(cfg.out_path, records, cfg);
      int flagged = 0;
      for (const auto& r : records) flagged += r.flagged ? 1 : 0;
      std::printf("wrote %zu trials to %s (%d flagged)\n", records.size(), cfg.out_path.c_str(),
                  flagged);
      return 0;
    }
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 0;
}
