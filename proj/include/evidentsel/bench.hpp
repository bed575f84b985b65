#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evidentsel/evidence.hpp"
#include "evidentsel/signals.hpp"
#include "evidentsel/types.hpp"
#include "evidentsel/upre.hpp"

namespace evsel {

struct BenchConfig {
  std::vector<SignalKind> signals{SignalKind::Boxcar};
  Index n = 256;
  int trials = 100;
  double snr_min = 2.0;
  double snr_max = 20.0;
  // dense | identity | deconvolve | deconvolve2d | radon
  std::string operator_kind = "dense";
  double psf_omega = 1.0;
  int reg_order = 1;
  bool run_me = true;
  bool run_upre = false;
  bool run_l1 = false;
  std::string mode = "general";  // general | spectral
  std::uint64_t seed = 1234;
  MEOptions me;
  UPREGrid upre_grid;
  int threads = 0;  // 0 -> hardware concurrency
  std::string out_path;

  /// Paper-sized runs: 500 trials; radon at 512 with 36 angles.
  bool paper_scale = false;
};

/// Parses the flat key=value config format (unknown keys rejected).
BenchConfig parse_bench_config_text(const std::string& text);
BenchConfig parse_bench_config(const std::string& path);

struct TrialRecord {
  std::string signal;
  Index n = 0;
  std::uint64_t seed = 0;
  double snr = 0.0;
  double true_sigma = 0.0;
  double recovered_sigma = 0.0;
  double lambda_me = 0.0;
  std::optional<double> lambda_upre;
  double err_l2 = 0.0;
  std::optional<double> err_l1;
  int iterations = 0;
  double wall_time = 0.0;
  bool flagged = false;
};

/// Runs all trials (worker pool, per-trial derived seeds, output ordered by
/// trial index regardless of scheduling). Single-trial failures flag the
/// record and the run continues.
std::vector<TrialRecord> run_bench(const BenchConfig& config);

void write_trials_csv(const std::string& path, const std::vector<TrialRecord>& records,
                      const BenchConfig& config);

}  // namespace evsel
