#include "evidentsel/signals.hpp"

#include <cmath>
#include <stdexcept>

#include "evidentsel/rng.hpp"

namespace evsel {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Three quadratic arcs with jump discontinuities at the seams (and across
// the wrap); derivative energy is kept well above the jump scale so the
// r = 1 zero-stability switch has room on either side.
double piecewise_quadratic_at(double x) {
  if (x < 1.0 / 3.0) {
    return 6.0 * x * x;
  }
  if (x < 2.0 / 3.0) {
    const double c = x - 0.5;
    return 1.0 - 8.0 * c * c;
  }
  const double c = 1.0 - x;
  return 0.3 + 3.0 * c * c;
}

}  // namespace

SignalKind signal_kind_from_name(const std::string& name) {
  if (name == "boxcar") return SignalKind::Boxcar;
  if (name == "hat") return SignalKind::Hat;
  if (name == "sine") return SignalKind::Sine;
  if (name == "pquad") return SignalKind::PiecewiseQuadratic;
  throw std::invalid_argument("unknown signal kind: " + name);
}

std::string signal_kind_name(SignalKind kind) {
  switch (kind) {
    case SignalKind::Boxcar: return "boxcar";
    case SignalKind::Hat: return "hat";
    case SignalKind::Sine: return "sine";
    case SignalKind::PiecewiseQuadratic: return "pquad";
  }
  return "unknown";
}

Vec gen_signal(SignalKind kind, Index n) {
  if (n < 8) throw std::invalid_argument("gen_signal: n must be >= 8");
  Vec u(n);
  switch (kind) {
    case SignalKind::Boxcar: {
      const Index lo = n / 4;
      const Index hi = 3 * n / 4;
      for (Index i = 0; i < n; ++i) u[i] = (i >= lo && i < hi) ? 1.0 : 0.0;
      break;
    }
    case SignalKind::Hat: {
      const double center = static_cast<double>(n - 1) / 2.0;
      for (Index i = 0; i < n; ++i)
        u[i] = 1.0 - std::abs(static_cast<double>(i) - center) / center;
      break;
    }
    case SignalKind::Sine: {
      for (Index i = 0; i < n; ++i)
        u[i] = std::sin(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n));
      break;
    }
    case SignalKind::PiecewiseQuadratic: {
      for (Index i = 0; i < n; ++i)
        u[i] = piecewise_quadratic_at(static_cast<double>(i) / static_cast<double>(n));
      break;
    }
  }
  return u;
}

Mat shepp_logan(Index n) {
  if (n < 2) throw std::invalid_argument("shepp_logan: n must be >= 2");
  // Ellipses: intensity, a, b, x0, y0, angle (degrees); modified contrast.
  static const double kEllipses[10][6] = {
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
      {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
      {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
      {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
      {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
      {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
      {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
      {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
      {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},
      {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
  };
  Mat img = Mat::Zero(n, n);
  for (Index r = 0; r < n; ++r) {
    const double y = (static_cast<double>(n) / 2.0 - static_cast<double>(r) - 0.5) /
                     (static_cast<double>(n) / 2.0);
    for (Index c = 0; c < n; ++c) {
      const double x = (static_cast<double>(c) + 0.5 - static_cast<double>(n) / 2.0) /
                       (static_cast<double>(n) / 2.0);
      double v = 0.0;
      for (const auto& e : kEllipses) {
        const double phi = e[5] * kPi / 180.0;
        const double dx = x - e[3];
        const double dy = y - e[4];
        const double xr = dx * std::cos(phi) + dy * std::sin(phi);
        const double yr = -dx * std::sin(phi) + dy * std::cos(phi);
        if (xr * xr / (e[1] * e[1]) + yr * yr / (e[2] * e[2]) <= 1.0) v += e[0];
      }
      img(r, c) = v;
    }
  }
  return img;
}

Mat blocks_phantom(Index n) {
  if (n < 8) throw std::invalid_argument("blocks_phantom: n must be >= 8");
  Mat img = Mat::Zero(n, n);
  auto rect = [&img, n](double r0, double c0, double r1, double c1, double v) {
    for (Index r = static_cast<Index>(r0 * n); r < static_cast<Index>(r1 * n); ++r)
      for (Index c = static_cast<Index>(c0 * n); c < static_cast<Index>(c1 * n); ++c)
        img(r, c) = v;
  };
  rect(0.10, 0.10, 0.90, 0.90, 0.3);
  rect(0.20, 0.15, 0.45, 0.40, 1.0);
  rect(0.55, 0.55, 0.85, 0.80, 0.7);
  rect(0.30, 0.55, 0.45, 0.85, 0.0);
  const double cy = 0.68 * static_cast<double>(n);
  const double cx = 0.35 * static_cast<double>(n);
  const double rad = 0.12 * static_cast<double>(n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c)
      if ((static_cast<double>(r) - cy) * (static_cast<double>(r) - cy) +
              (static_cast<double>(c) - cx) * (static_cast<double>(c) - cx) <=
          rad * rad)
        img(r, c) = 0.9;
  return img;
}

NoisySample add_noise(const Vec& clean_b, double snr, std::uint64_t seed,
                      SnrConvention convention) {
  if (!(snr > 0.0)) throw std::invalid_argument("add_noise: snr must be > 0");
  const Index m = clean_b.size();
  double scale = 0.0;
  if (convention == SnrConvention::MeanOverSigma) {
    scale = clean_b.mean();
  } else {
    const double mean = clean_b.mean();
    scale = std::sqrt((clean_b.array() - mean).square().sum() / static_cast<double>(m));
  }
  const double sigma = scale / snr;
  if (!(sigma > 0.0))
    throw std::invalid_argument("add_noise: SNR convention yields nonpositive sigma");

  NoisySample sample;
  sample.clean_b = clean_b;
  sample.noisy_b = clean_b;
  sample.true_sigma = sigma;
  sample.snr = snr;
  sample.seed = seed;
  Rng rng(seed);
  for (Index i = 0; i < m; ++i) sample.noisy_b[i] += sigma * rng.normal();
  return sample;
}

double relative_error(const Vec& u, const Vec& v) {
  const double ref = v.norm();
  if (ref == 0.0) throw std::invalid_argument("relative_error: zero reference");
  return (u - v).norm() / ref;
}

}  // namespace evsel
