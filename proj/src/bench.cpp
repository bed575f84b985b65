#include "evidentsel/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "evidentsel/io.hpp"
#include "evidentsel/l1.hpp"
#include "evidentsel/rng.hpp"

namespace evsel {

namespace {

const std::set<std::string> kBenchKeys = {
    "signal",   "n",       "trials",  "snr_min", "snr_max", "operator", "psf_omega",
    "reg_order", "methods", "mode",    "seed",    "lambda0", "tol",      "max_iter",
    "probes",   "out",     "threads"};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

Index radon_default_bins(Index n) {
  Index bins = static_cast<Index>(std::ceil(std::sqrt(2.0) * static_cast<double>(n))) + 4;
  if (bins % 2 == 0) ++bins;
  return bins;
}

struct TrialSetup {
  LinearProblem problem;
  std::optional<SpectralModel> model;  // set when the spectral path applies
  Vec truth;
  double snr = 0.0;
  double true_sigma = 0.0;
  std::uint64_t seed = 0;
};

TrialSetup build_trial(const BenchConfig& cfg, SignalKind kind, int trial_index) {
  TrialSetup setup;
  const std::uint64_t trial_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(trial_index));
  setup.seed = trial_seed;
  Rng snr_rng(mix_seed(trial_seed, 1));
  setup.snr = cfg.snr_min + (cfg.snr_max - cfg.snr_min) * snr_rng.uniform();
  const std::uint64_t noise_seed = mix_seed(trial_seed, 2);

  if (cfg.operator_kind == "deconvolve2d" || cfg.operator_kind == "radon") {
    const Mat img = shepp_logan(cfg.n);
    Vec u(cfg.n * cfg.n);
    for (Index r = 0; r < cfg.n; ++r)
      for (Index c = 0; c < cfg.n; ++c) u[r * cfg.n + c] = img(r, c);
    setup.truth = u;

    if (cfg.operator_kind == "deconvolve2d") {
      const Mat psf = make_gaussian_psf_2d(cfg.n, cfg.psf_omega);
      auto A = std::make_shared<Circulant2DOperator>(psf);
      const Vec clean = A->apply(u);
      const NoisySample sample =
          add_noise(clean, setup.snr, noise_seed, SnrConvention::MeanOverSigma);
      setup.true_sigma = sample.true_sigma;
      setup.problem.A = A;
      setup.problem.T = make_fd_regularizer({cfg.reg_order, cfg.n, 2});
      setup.problem.b = sample.noisy_b;
      setup.model = SpectralModel::deconvolve_2d(psf, cfg.reg_order);
    } else {
      RadonSpec spec;
      spec.n = cfg.n;
      const int n_angles = cfg.paper_scale ? 36 : 18;
      for (int a = 0; a < n_angles; ++a)
        spec.angles_deg.push_back(180.0 * a / n_angles);
      spec.detector_count = cfg.paper_scale ? cfg.n : radon_default_bins(cfg.n);
      auto A = make_radon(spec);
      const Vec clean = A->apply(u);
      const NoisySample sample =
          add_noise(clean, setup.snr, noise_seed, SnrConvention::StddevOverSigma);
      setup.true_sigma = sample.true_sigma;
      setup.problem.A = A;
      setup.problem.T = make_fd_regularizer({cfg.reg_order, cfg.n, 2});
      setup.problem.b = sample.noisy_b;
    }
    setup.problem.truth = setup.truth;
    return setup;
  }

  const Vec u = gen_signal(kind, cfg.n);
  setup.truth = u;
  OperatorPtr A;
  if (cfg.operator_kind == "dense") {
    Rng a_rng(mix_seed(trial_seed, 3));
    A = std::make_shared<DenseOperator>(gaussian_matrix(a_rng, cfg.n, cfg.n));
  } else if (cfg.operator_kind == "identity") {
    A = std::make_shared<IdentityOperator>(cfg.n);
    setup.model = SpectralModel::denoise_1d(cfg.n, cfg.reg_order);
  } else if (cfg.operator_kind == "deconvolve") {
    const Vec psf = make_gaussian_psf(cfg.n, cfg.psf_omega);
    A = std::make_shared<CirculantOperator>(psf);
    setup.model = SpectralModel::deconvolve_1d(psf, cfg.reg_order);
  } else {
    throw std::invalid_argument("bench: unknown operator kind '" + cfg.operator_kind + "'");
  }

  const Vec clean = A->apply(u);
  const NoisySample sample =
      add_noise(clean, setup.snr, noise_seed, SnrConvention::StddevOverSigma);
  setup.true_sigma = sample.true_sigma;
  setup.problem.A = A;
  setup.problem.T = make_fd_regularizer({cfg.reg_order, cfg.n, 1});
  setup.problem.b = sample.noisy_b;
  setup.problem.truth = u;
  return setup;
}

TrialRecord run_trial(const BenchConfig& cfg, SignalKind kind, int trial_index) {
  TrialRecord rec;
  rec.signal = (cfg.operator_kind == "deconvolve2d" || cfg.operator_kind == "radon")
                   ? "shepp"
                   : signal_kind_name(kind);
  rec.n = cfg.n;
  const auto start = std::chrono::steady_clock::now();
  try {
    TrialSetup setup = build_trial(cfg, kind, trial_index);
    rec.seed = setup.seed;
    rec.snr = setup.snr;
    rec.true_sigma = setup.true_sigma;

    MEOptions me = cfg.me;
    me.seed = mix_seed(setup.seed, 4);

    const bool spectral = cfg.mode == "spectral" && setup.model.has_value();
    METrajectory traj;
    Vec u_l2;
    if (spectral) {
      SpectralMEResult result = me_iterate_spectral(*setup.model, setup.problem.b, me);
      traj = std::move(result.trajectory);
      u_l2 = std::move(result.u);
    } else {
      traj = me_iterate_general(setup.problem, me);
      u_l2 = me_solve_final(setup.problem, traj, me.cg).u;
    }
    if (traj.states.empty()) {
      rec.flagged = true;
      return rec;
    }
    rec.recovered_sigma = traj.final_sigma();
    rec.lambda_me = traj.final_lambda();
    rec.iterations = traj.iterations();
    rec.flagged = traj.stop_reason == StopReason::Divergence;
    rec.err_l2 = relative_error(u_l2, setup.truth);

    if (cfg.run_upre) {
      const double sigma_sq = setup.true_sigma * setup.true_sigma;
      UPRESelection sel;
      if (setup.model) {
        sel = upre_select_spectral(*setup.model, setup.problem.b, sigma_sq, cfg.upre_grid);
      } else {
        sel = upre_select_general(*setup.problem.A, *setup.problem.T, setup.problem.b, sigma_sq,
                                  cfg.upre_grid, cfg.me.probe_count, mix_seed(setup.seed, 5),
                                  cfg.me.cg);
      }
      rec.lambda_upre = sel.lambda;
    }

    if (cfg.run_l1) {
      const double lambda_1 = map_to_l1(traj.final_state().sigma_sq, traj.final_eta());
      ADMMConfig admm;
      L1Result l1 = setup.model && setup.model->kind != SpectralKind::FourierMask
                        ? solve_l1_admm_spectral(*setup.model, setup.problem.b, lambda_1, admm)
                        : solve_l1_admm(*setup.problem.A, *setup.problem.T, setup.problem.b,
                                        lambda_1, admm);
      rec.err_l1 = relative_error(l1.u, setup.truth);
    }
  } catch (const std::exception&) {
    rec.flagged = true;
  }
  rec.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace

BenchConfig parse_bench_config_text(const std::string& text) {
  const auto kv = parse_config(text, kBenchKeys);
  BenchConfig cfg;
  auto get = [&kv](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  if (const auto* v = get("signal")) {
    cfg.signals.clear();
    if (*v == "all") {
      cfg.signals = {SignalKind::Boxcar, SignalKind::Hat, SignalKind::Sine,
                     SignalKind::PiecewiseQuadratic};
    } else {
      for (const auto& name : split_list(*v)) cfg.signals.push_back(signal_kind_from_name(name));
    }
  }
  if (const auto* v = get("n")) cfg.n = std::stol(*v);
  if (const auto* v = get("trials")) cfg.trials = std::stoi(*v);
  if (const auto* v = get("snr_min")) cfg.snr_min = std::stod(*v);
  if (const auto* v = get("snr_max")) cfg.snr_max = std::stod(*v);
  if (const auto* v = get("operator")) cfg.operator_kind = *v;
  if (const auto* v = get("psf_omega")) cfg.psf_omega = std::stod(*v);
  if (const auto* v = get("reg_order")) cfg.reg_order = std::stoi(*v);
  if (const auto* v = get("methods")) {
    cfg.run_me = cfg.run_upre = cfg.run_l1 = false;
    for (const auto& method : split_list(*v)) {
      if (method == "me") cfg.run_me = true;
      else if (method == "upre") cfg.run_upre = true;
      else if (method == "l1") cfg.run_l1 = true;
      else throw std::invalid_argument("bench: unknown method '" + method + "'");
    }
  }
  if (const auto* v = get("mode")) cfg.mode = *v;
  if (const auto* v = get("seed")) cfg.seed = std::stoull(*v);
  if (const auto* v = get("lambda0")) cfg.me.lambda0 = std::stod(*v);
  if (const auto* v = get("tol")) cfg.me.tol = std::stod(*v);
  if (const auto* v = get("max_iter")) cfg.me.max_iter = std::stoi(*v);
  if (const auto* v = get("probes")) cfg.me.probe_count = std::stoi(*v);
  if (const auto* v = get("out")) cfg.out_path = *v;
  if (const auto* v = get("threads")) cfg.threads = std::stoi(*v);
  return cfg;
}

BenchConfig parse_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("bench config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_bench_config_text(buf.str());
}

std::vector<TrialRecord> run_bench(const BenchConfig& config_in) {
  BenchConfig cfg = config_in;
  if (cfg.paper_scale) {
    cfg.trials = 500;
    if (cfg.operator_kind == "radon") cfg.n = 512;
  }
  const bool image_problem =
      cfg.operator_kind == "deconvolve2d" || cfg.operator_kind == "radon";
  const std::vector<SignalKind> kinds =
      image_problem ? std::vector<SignalKind>{SignalKind::Boxcar} : cfg.signals;

  struct Task {
    SignalKind kind;
    int trial_index;
  };
  std::vector<Task> tasks;
  int next_index = 0;
  for (SignalKind kind : kinds)
    for (int t = 0; t < cfg.trials; ++t) tasks.push_back({kind, next_index++});

  std::vector<TrialRecord> records(tasks.size());
  unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(tasks.size()));

  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= tasks.size()) return;
      records[i] = run_trial(cfg, tasks[i].kind, tasks[i].trial_index);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return records;
}

void write_trials_csv(const std::string& path, const std::vector<TrialRecord>& records,
                      const BenchConfig& config) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    rows.push_back({r.signal, std::to_string(r.n), std::to_string(r.seed), format_double(r.snr),
                    format_double(r.true_sigma), format_double(r.recovered_sigma),
                    format_double(r.lambda_me),
                    r.lambda_upre ? format_double(*r.lambda_upre) : "",
                    format_double(r.err_l2), r.err_l1 ? format_double(*r.err_l1) : "",
                    std::to_string(r.iterations), format_double(r.wall_time),
                    r.flagged ? "1" : "0"});
  }
  write_csv(path,
            {"signal", "n", "seed", "snr", "true_sigma", "recovered_sigma", "lambda_me",
             "lambda_upre", "err_l2", "err_l1", "iterations", "wall_time", "flagged"},
            rows);

  const bool image_problem =
      config.operator_kind == "deconvolve2d";
  std::vector<std::vector<std::string>> meta = {
      {"master_seed", std::to_string(config.seed)},
      {"operator", config.operator_kind},
      {"mode", config.mode},
      {"snr_convention", image_problem ? "mean/sigma" : "stddev/sigma"},
      {"reg_order", std::to_string(config.reg_order)},
      {"lambda0", format_double(config.me.lambda0)},
      {"tol", format_double(config.me.tol)},
      {"probes", std::to_string(config.me.probe_count)},
  };
  const auto dot = path.rfind('.');
  const std::string stem = dot == std::string::npos ? path : path.substr(0, dot);
  write_csv(stem + ".meta.csv", {"key", "value"}, meta);
}

}  // namespace evsel
