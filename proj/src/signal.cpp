#include "vitals/signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "vitals/error.hpp"

namespace vitals {

namespace {

using Eigen::ArrayXcd;
using Eigen::ArrayXd;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative radix-2 Cooley-Tukey; data.size() must be a power of two.
void fft_pow2(ArrayXcd& data, bool inverse) {
  const std::size_t n = static_cast<std::size_t>(data.size());
  if (n < 2) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> even = data[i + k];
        const std::complex<double> odd = data[i + k + len / 2] * w;
        data[i + k] = even + odd;
        data[i + k + len / 2] = even - odd;
        w *= wlen;
      }
    }
  }
  if (inverse) data /= static_cast<double>(n);
}

ArrayXd hann_window(Eigen::Index n) {
  // periodic form: a tone on a bin stays confined to that bin and its neighbours
  ArrayXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / static_cast<double>(n)));
  }
  return w;
}

}  // namespace

UniformSeries resample_uniform(const IppgSeries& s, double rate_hz, double max_gap_s) {
  if (s.samples.size() < 2) {
    throw InsufficientDataError("resample_uniform: need at least 2 samples, have " +
                                std::to_string(s.samples.size()));
  }
  if (rate_hz <= 0.0) {
    throw ConfigError("resample_uniform: rate_hz must be positive");
  }

  const double t0 = s.samples.front().t_s;
  const double t1 = s.samples.back().t_s;
  const Eigen::Index n = static_cast<Eigen::Index>(std::floor((t1 - t0) * rate_hz)) + 1;

  UniformSeries out;
  out.start_s = t0;
  out.rate_hz = rate_hz;
  out.values.resize(n);
  out.gap_flag.assign(static_cast<std::size_t>(n), false);

  std::size_t seg = 0;  // current bracketing segment [seg, seg+1]
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = t0 + i / rate_hz;
    while (seg + 2 < s.samples.size() && s.samples[seg + 1].t_s < t) ++seg;
    const TimedValue& a = s.samples[seg];
    const TimedValue& b = s.samples[seg + 1];

    const double d_left = t - a.t_s;
    const double d_right = b.t_s - t;
    if (std::min(d_left, d_right) > max_gap_s) {
      out.values[i] = d_left <= d_right ? a.value : b.value;
      out.gap_flag[static_cast<std::size_t>(i)] = true;
      continue;
    }
    const double span = b.t_s - a.t_s;
    const double w = span > 0.0 ? std::clamp(d_left / span, 0.0, 1.0) : 0.0;
    out.values[i] = a.value + w * (b.value - a.value);
  }
  return out;
}

Spectrum spectrum(const UniformSeries& u, int zero_pad_factor) {
  const Eigen::Index n = u.values.size();
  if (n < 8) {
    throw InsufficientDataError("spectrum: need at least 8 samples, have " +
                                std::to_string(n));
  }
  if (zero_pad_factor < 1) {
    throw ConfigError("spectrum: zero_pad_factor must be >= 1");
  }

  const ArrayXd detrended = u.values - u.values.mean();
  const ArrayXd windowed = detrended * hann_window(n);

  const std::size_t nfft =
      next_pow2(static_cast<std::size_t>(n) * static_cast<std::size_t>(zero_pad_factor));
  ArrayXcd buf = ArrayXcd::Zero(static_cast<Eigen::Index>(nfft));
  buf.head(n).real() = windowed;
  fft_pow2(buf, false);

  const Eigen::Index half = static_cast<Eigen::Index>(nfft / 2);
  Spectrum sp;
  sp.freqs_hz.resize(half + 1);
  sp.mags.resize(half + 1);
  const double df = u.rate_hz / static_cast<double>(nfft);
  for (Eigen::Index k = 0; k <= half; ++k) {
    sp.freqs_hz[k] = k * df;
    sp.mags[k] = std::abs(buf[k]);
  }
  sp.window_len_s = n / u.rate_hz;
  return sp;
}

BandPeak band_peak(const Spectrum& sp, const Band& band) {
  if (!(band.lo_hz > 0.0 && band.lo_hz < band.hi_hz)) {
    throw ConfigError("band_peak: invalid band");
  }
  const Eigen::Index n = sp.freqs_hz.size();
  Eigen::Index first = -1, last = -1;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (sp.freqs_hz[k] >= band.lo_hz && sp.freqs_hz[k] <= band.hi_hz) {
      if (first < 0) first = k;
      last = k;
    }
  }
  if (first < 0) {
    throw BandResolutionError("band_peak: no spectrum bin inside [" +
                              std::to_string(band.lo_hz) + ", " +
                              std::to_string(band.hi_hz) + "] Hz");
  }

  Eigen::Index peak = first;
  for (Eigen::Index k = first + 1; k <= last; ++k) {
    if (sp.mags[k] > sp.mags[peak]) peak = k;  // strict: ties keep the lower bin
  }

  double freq = sp.freqs_hz[peak];
  if (peak > 0 && peak + 1 < n) {
    const double y1 = sp.mags[peak - 1];
    const double y2 = sp.mags[peak];
    const double y3 = sp.mags[peak + 1];
    const double denom = y1 - 2.0 * y2 + y3;
    if (std::fabs(denom) > 1e-30) {
      const double delta = std::clamp(0.5 * (y1 - y3) / denom, -0.5, 0.5);
      const double df = sp.freqs_hz[1] - sp.freqs_hz[0];
      freq += delta * df;
    }
  }
  freq = std::clamp(freq, band.lo_hz, band.hi_hz);

  return {freq, sp.mags[peak], 60.0 * freq};
}

UniformSeries band_filter(const UniformSeries& u, const Band& band) {
  const Eigen::Index n = u.values.size();
  if (n < 8) {
    throw InsufficientDataError("band_filter: need at least 8 samples, have " +
                                std::to_string(n));
  }
  if (!(band.lo_hz > 0.0 && band.lo_hz < band.hi_hz)) {
    throw ConfigError("band_filter: invalid band");
  }

  // exact-length DFT: the reconstruction must be free of padding artifacts
  using Cplx = std::complex<double>;
  const double w0 = -2.0 * std::numbers::pi / static_cast<double>(n);
  Eigen::ArrayXcd bins(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Cplx acc(0.0, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ang = w0 * static_cast<double>(k) * static_cast<double>(i);
      acc += u.values[i] * Cplx(std::cos(ang), std::sin(ang));
    }
    bins[k] = acc;
  }

  const double df = u.rate_hz / static_cast<double>(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    // bin k and bin n-k carry +f and -f; judge both by the positive alias
    const double f = std::min(static_cast<double>(k), static_cast<double>(n - k)) * df;
    if (f < band.lo_hz || f > band.hi_hz) bins[k] = Cplx(0.0, 0.0);
  }

  UniformSeries out;
  out.start_s = u.start_s;
  out.rate_hz = u.rate_hz;
  out.gap_flag = u.gap_flag;
  out.values.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Cplx acc(0.0, 0.0);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double ang = -w0 * static_cast<double>(k) * static_cast<double>(i);
      acc += bins[k] * Cplx(std::cos(ang), std::sin(ang));
    }
    out.values[i] = acc.real() / static_cast<double>(n);
  }
  return out;
}

}  // namespace vitals
