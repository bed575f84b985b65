#include "evidentsel/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace evsel {

namespace {

void require_stream(const std::ios& s, const std::string& path, const char* action) {
  if (!s) throw std::runtime_error(std::string(action) + " failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require_stream(in, path, "open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

void put_u32_le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  require_stream(out, path, "open");
  auto write_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(row[i]);
    }
    out << "\r\n";
  };
  write_row(header);
  for (const auto& row : rows) write_row(row);
  require_stream(out, path, "write");
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool row_started = false;

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      row_started = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
      row_started = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (row_started || !field.empty()) {
        row.push_back(field);
        field.clear();
        records.push_back(row);
        row.clear();
        row_started = false;
      }
    } else {
      field += c;
      row_started = true;
    }
  }
  if (row_started || !field.empty()) {
    row.push_back(field);
    records.push_back(row);
  }
  return records;
}

void write_signal_csv(const std::string& path, const Vec& v) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(static_cast<std::size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i)
    rows.push_back({std::to_string(i), format_double(v[i])});
  write_csv(path, {"index", "value"}, rows);
}

Vec read_signal_csv(const std::string& path) {
  const auto records = read_csv(path);
  if (records.size() < 2) throw std::runtime_error("signal csv: no data rows in " + path);
  const bool two_col = records[0].size() >= 2;
  Vec v(static_cast<Index>(records.size() - 1));
  for (std::size_t i = 1; i < records.size(); ++i) {
    const std::string& cell = two_col ? records[i][1] : records[i][0];
    v[static_cast<Index>(i - 1)] = std::stod(cell);
  }
  return v;
}

void write_trajectory_csv(const std::string& path, const METrajectory& traj) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const MEState& s = traj.states[i];
    std::string change = i == 0 ? "" : format_double(traj.solution_change[i - 1]);
    rows.push_back({std::to_string(s.k), format_double(s.sigma_sq), format_double(s.eta_sq),
                    format_double(s.lambda), change});
  }
  write_csv(path, {"k", "sigma_sq", "eta_sq", "lambda", "solution_change"}, rows);
}

void write_fixpoint_csv(const std::string& path, const FixedPointReport& report) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(report.scan.size());
  for (const auto& [lambda, f_val] : report.scan)
    rows.push_back({format_double(lambda), format_double(f_val)});
  write_csv(path, {"lambda", "f_lambda"}, rows);
}

std::string default_sidecar_path(const std::string& pgm_path) {
  const auto dot = pgm_path.rfind('.');
  const std::string stem = dot == std::string::npos ? pgm_path : pgm_path.substr(0, dot);
  return stem + "_range.csv";
}

void write_pgm16(const std::string& path, const Mat& image, const std::string& sidecar_path) {
  const double lo = image.minCoeff();
  const double hi = image.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;

  std::ofstream out(path, std::ios::binary);
  require_stream(out, path, "open");
  out << "P5\n" << image.cols() << " " << image.rows() << "\n65535\n";
  for (Index r = 0; r < image.rows(); ++r) {
    for (Index c = 0; c < image.cols(); ++c) {
      const double unit = (image(r, c) - lo) / span;
      const auto q = static_cast<std::uint32_t>(unit * 65535.0 + 0.5);
      const auto clamped = static_cast<std::uint16_t>(q > 65535 ? 65535 : q);
      out.put(static_cast<char>((clamped >> 8) & 0xff));  // big-endian
      out.put(static_cast<char>(clamped & 0xff));
    }
  }
  require_stream(out, path, "write");
  write_csv(sidecar_path, {"min", "max"}, {{format_double(lo), format_double(hi)}});
}

Mat read_pgm16(const std::string& path, const std::string& sidecar_path) {
  std::ifstream in(path, std::ios::binary);
  require_stream(in, path, "open");
  std::string magic;
  in >> magic;
  if (magic != "P5") throw std::runtime_error("pgm: expected P5 in " + path);
  auto next_token = [&in, &path]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw std::runtime_error("pgm: truncated header in " + path);
  };
  const Index cols = std::stol(next_token());
  const Index rows = std::stol(next_token());
  const long maxval = std::stol(next_token());
  if (maxval != 65535) throw std::runtime_error("pgm: expected 16-bit samples in " + path);
  in.get();  // single whitespace after maxval

  const auto range = read_csv(sidecar_path);
  if (range.size() < 2 || range[1].size() < 2)
    throw std::runtime_error("pgm sidecar: malformed " + sidecar_path);
  const double lo = std::stod(range[1][0]);
  const double hi = std::stod(range[1][1]);
  const double span = hi > lo ? hi - lo : 0.0;

  Mat image(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const int hi_byte = in.get();
      const int lo_byte = in.get();
      if (hi_byte < 0 || lo_byte < 0) throw std::runtime_error("pgm: truncated data in " + path);
      const double unit = static_cast<double>((hi_byte << 8) | lo_byte) / 65535.0;
      image(r, c) = lo + unit * span;
    }
  }
  return image;
}

void write_evf(const std::string& path, const Vec& v) {
  std::string header = "EVF1";
  put_u32_le(header, 1);
  put_u32_le(header, static_cast<std::uint32_t>(v.size()));
  put_u32_le(header, 1);
  std::ofstream out(path, std::ios::binary);
  require_stream(out, path, "open");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(sizeof(double) * v.size()));
  require_stream(out, path, "write");
}

void write_evf(const std::string& path, const Mat& m) {
  std::string header = "EVF1";
  put_u32_le(header, 2);
  put_u32_le(header, static_cast<std::uint32_t>(m.rows()));
  put_u32_le(header, static_cast<std::uint32_t>(m.cols()));
  std::ofstream out(path, std::ios::binary);
  require_stream(out, path, "open");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof(double));
    }
  require_stream(out, path, "write");
}

EvfArray read_evf(const std::string& path) {
  const std::string blob = read_file(path);
  if (blob.size() < 16 || blob.compare(0, 4, "EVF1") != 0)
    throw std::runtime_error("evf: bad magic in " + path);
  const auto* p = reinterpret_cast<const unsigned char*>(blob.data());
  EvfArray arr;
  arr.rank = static_cast<int>(get_u32_le(p + 4));
  arr.dims[0] = static_cast<Index>(get_u32_le(p + 8));
  arr.dims[1] = static_cast<Index>(get_u32_le(p + 12));
  if (arr.rank != 1 && arr.rank != 2) throw std::runtime_error("evf: unsupported rank");
  const Index total = arr.dims[0] * (arr.rank == 2 ? arr.dims[1] : 1);
  if (blob.size() != 16 + sizeof(double) * static_cast<std::size_t>(total))
    throw std::runtime_error("evf: payload size mismatch in " + path);
  arr.data.resize(total);
  std::memcpy(arr.data.data(), blob.data() + 16, sizeof(double) * static_cast<std::size_t>(total));
  if (arr.rank == 1) arr.dims[1] = 1;
  return arr;
}

std::map<std::string, std::string> parse_config(const std::string& text,
                                                const std::set<std::string>& allowed_keys) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (!allowed_keys.count(key))
      throw std::runtime_error("config line " + std::to_string(line_no) + ": unknown key '" + key +
                               "'");
    out[key] = value;
  }
  return out;
}

std::map<std::string, std::string> parse_config_file(const std::string& path,
                                                     const std::set<std::string>& allowed_keys) {
  return parse_config(read_file(path), allowed_keys);
}

}  // namespace evsel
