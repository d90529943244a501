#pragma once

#include <vector>

#include <Eigen/Dense>

#include "vitals/roi.hpp"

namespace vitals {

struct TimedValue {
  double t_s = 0.0;
  double value = 0.0;
};

// Irregularly sampled iPPG observations, timestamps strictly increasing.
struct IppgSeries {
  std::vector<TimedValue> samples;
  Channel channel = Channel::hue;

  void push(double t_s, double value) { samples.push_back({t_s, value}); }
};

// Regular grid produced by resample_uniform. gap_flag marks grid points that
// sat farther than max_gap_s from any real sample and were hold-filled.
struct UniformSeries {
  double start_s = 0.0;
  double rate_hz = 0.0;
  Eigen::ArrayXd values;
  std::vector<bool> gap_flag;
};

// One-sided magnitude spectrum; freqs ascend over [0, rate/2].
struct Spectrum {
  Eigen::ArrayXd freqs_hz;
  Eigen::ArrayXd mags;
  double window_len_s = 0.0;
};

struct Band {
  double lo_hz = 0.0;
  double hi_hz = 0.0;
};

struct BandPeak {
  double freq_hz = 0.0;
  double mag = 0.0;
  double rate_per_min = 0.0;  // 60 * freq_hz
};

// Linear interpolation onto a uniform grid spanning [t_first, t_last];
// output length = floor((t_last - t_first) * rate_hz) + 1. Grid points
// farther than max_gap_s from any real sample hold the nearest sample's value
// and are flagged. Throws InsufficientDataError below 2 samples.
UniformSeries resample_uniform(const IppgSeries& s, double rate_hz, double max_gap_s);

// Mean removal, Hann window, FFT of length next_pow2(len * zero_pad_factor),
// magnitudes of the non-negative bins. Requires length >= 8.
Spectrum spectrum(const UniformSeries& u, int zero_pad_factor = 4);

// Argmax of magnitude over bins with lo_hz <= f <= hi_hz, ties toward the
// lower frequency, refined by parabolic interpolation then clamped to the
// band. Throws BandResolutionError when no bin falls inside the band.
BandPeak band_peak(const Spectrum& sp, const Band& band);

// Zero-phase band isolation: exact-length DFT, zero every bin outside
// [lo_hz, hi_hz] (and the mirrored negative frequencies), inverse DFT.
// Output length equals input length.
UniformSeries band_filter(const UniformSeries& u, const Band& band);

}  // namespace vitals
