#pragma once

#include <cstdint>
#include <string>

#include "evidentsel/types.hpp"

namespace evsel {

enum class SignalKind { Boxcar, Hat, Sine, PiecewiseQuadratic };

SignalKind signal_kind_from_name(const std::string& name);
std::string signal_kind_name(SignalKind kind);

/// Canonical 1D test signals on n samples: boxcar plateau of height 1 on
/// [n/4, 3n/4), symmetric hat with unit peak, one full sine period, and a
/// three-piece quadratic with jump discontinuities.
Vec gen_signal(SignalKind kind, Index n);

/// Piecewise-constant head phantom (Shepp-Logan ellipses, modified
/// intensities), sampled at pixel centers on [-1,1]^2.
Mat shepp_logan(Index n);

/// High-contrast piecewise-constant phantom (rectangles and a disk);
/// the total-variation-friendly deconvolution test image.
Mat blocks_phantom(Index n);

enum class SnrConvention {
  StddevOverSigma,  // 1D: sigma = stddev(clean) / snr
  MeanOverSigma,    // 2D images: sigma = mean(clean) / snr
};

struct NoisySample {
  Vec clean_b;
  Vec noisy_b;
  double true_sigma = 0.0;
  double snr = 0.0;
  std::uint64_t seed = 0;
};

/// Adds i.i.d. N(0, sigma^2) noise with sigma set by the SNR convention.
/// Rejects configurations where the implied sigma is not positive.
NoisySample add_noise(const Vec& clean_b, double snr, std::uint64_t seed,
                      SnrConvention convention);

/// ||u - v|| / ||v||; rejects a zero reference.
double relative_error(const Vec& u, const Vec& v);

}  // namespace evsel
