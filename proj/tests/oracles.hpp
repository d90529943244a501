// Test-only oracles, deliberately independent of the library implementation:
// a direct O(n^2) DFT, a from-scratch spectrum pipeline built on it, and a
// from-scratch HSV -> RGB inverse. None of this code shares a path with
// src/; that independence is what makes the equivalence tests meaningful.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

namespace oracle {

inline std::vector<std::complex<double>> brute_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double ang = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(i) /
                         static_cast<double>(n);
      acc += x[i] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

// Same contract the library documents for spectrum(): mean removal, periodic
// Hann, zero-pad to next_pow2(n * zpf), magnitudes of bins 0..nfft/2.
inline std::vector<double> spectrum_mags(const std::vector<double>& values, int zpf) {
  const std::size_t n = values.size();
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);

  std::size_t nfft = 1;
  while (nfft < n * static_cast<std::size_t>(zpf)) nfft <<= 1;

  std::vector<double> padded(nfft, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / static_cast<double>(n)));
    padded[i] = (values[i] - mean) * w;
  }
  const auto bins = brute_dft(padded);
  std::vector<double> mags(nfft / 2 + 1);
  for (std::size_t k = 0; k <= nfft / 2; ++k) mags[k] = std::abs(bins[k]);
  return mags;
}

// Textbook hexcone inverse on [0,1) hue; returns rounded 8-bit channels.
inline void hsv_to_rgb(double h, double s, double v, int& r, int& g, int& b) {
  const double c = v * s;
  const double hp = h * 6.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double rf = 0, gf = 0, bf = 0;
  if (hp < 1)      { rf = c; gf = x; bf = 0; }
  else if (hp < 2) { rf = x; gf = c; bf = 0; }
  else if (hp < 3) { rf = 0; gf = c; bf = x; }
  else if (hp < 4) { rf = 0; gf = x; bf = c; }
  else if (hp < 5) { rf = x; gf = 0; bf = c; }
  else             { rf = c; gf = 0; bf = x; }
  const double m = v - c;
  r = static_cast<int>(std::lround((rf + m) * 255.0));
  g = static_cast<int>(std::lround((gf + m) * 255.0));
  b = static_cast<int>(std::lround((bf + m) * 255.0));
}

// Unique scratch directory under the build tree; removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("vitals_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

private:
  std::filesystem::path path_;
};

}  // namespace oracle
