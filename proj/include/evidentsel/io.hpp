#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "evidentsel/analysis.hpp"
#include "evidentsel/evidence.hpp"
#include "evidentsel/types.hpp"

namespace evsel {

// CSV (RFC 4180: CRLF line ends, quoting only where needed, header row).

std::string csv_escape(const std::string& field);
std::string format_double(double v);  // shortest round-trippable %.17g form

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Parses records honoring quoted fields; the header row is returned first.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

/// Single-signal files: header "index,value".
void write_signal_csv(const std::string& path, const Vec& v);
Vec read_signal_csv(const std::string& path);

/// Trajectory rows: k, sigma_sq, eta_sq, lambda, solution_change (blank on
/// the first row).
void write_trajectory_csv(const std::string& path, const METrajectory& traj);

/// Fixed-point scan rows: lambda, f_lambda.
void write_fixpoint_csv(const std::string& path, const FixedPointReport& report);

// Images: binary PGM (P5), 16-bit big-endian samples, linearly mapped from
// the recorded float range; the range lives in a sidecar CSV (min,max).

void write_pgm16(const std::string& path, const Mat& image, const std::string& sidecar_path);
Mat read_pgm16(const std::string& path, const std::string& sidecar_path);
std::string default_sidecar_path(const std::string& pgm_path);

// Raw float64 little-endian arrays, 16-byte header:
// magic "EVF1", u32 rank (1 or 2), u32 dims[2] (dims[1] = 1 for rank 1).

void write_evf(const std::string& path, const Vec& v);
void write_evf(const std::string& path, const Mat& m);
struct EvfArray {
  int rank = 1;
  Index dims[2] = {0, 1};
  Vec data;  // row-major
};
EvfArray read_evf(const std::string& path);

/// Flat "key = value" config text; '#' starts a comment line. Keys outside
/// the allowed set are rejected.
std::map<std::string, std::string> parse_config(const std::string& text,
                                                const std::set<std::string>& allowed_keys);
std::map<std::string, std::string> parse_config_file(const std::string& path,
                                                     const std::set<std::string>& allowed_keys);

}  // namespace evsel
