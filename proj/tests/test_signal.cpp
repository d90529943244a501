#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "vitals/error.hpp"
#include "vitals/signal.hpp"

using namespace vitals;

namespace {

IppgSeries series_from(const std::vector<double>& t, const std::vector<double>& v) {
  IppgSeries s;
  for (std::size_t i = 0; i < t.size(); ++i) s.push(t[i], v[i]);
  return s;
}

UniformSeries uniform_from(const std::vector<double>& values, double rate) {
  UniformSeries u;
  u.start_s = 0.0;
  u.rate_hz = rate;
  u.values = Eigen::Map<const Eigen::ArrayXd>(values.data(),
                                              static_cast<Eigen::Index>(values.size()));
  u.gap_flag.assign(values.size(), false);
  return u;
}

}  // namespace

TEST_CASE("resample_uniform interpolates a linear ramp") {
  const UniformSeries u = resample_uniform(series_from({0, 1, 2}, {0, 1, 2}), 2.0, 10.0);
  REQUIRE(u.values.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(u.values[i] == doctest::Approx(0.5 * i).epsilon(1e-12));
  CHECK(u.rate_hz == 2.0);
  CHECK(u.start_s == 0.0);
}

TEST_CASE("resample_uniform keeps a constant series constant across gaps") {
  const UniformSeries u =
      resample_uniform(series_from({0, 0.1, 3.0, 3.1, 9.0}, {4, 4, 4, 4, 4}), 9.0, 0.5);
  for (Eigen::Index i = 0; i < u.values.size(); ++i) CHECK(u.values[i] == 4.0);
  // interior grid points far from any sample must carry the gap flag
  bool any_flag = false;
  for (bool f : u.gap_flag) any_flag |= f;
  CHECK(any_flag);
}

TEST_CASE("resample_uniform rejects underfull series") {
  CHECK_THROWS_AS(resample_uniform(series_from({1.0}, {2.0}), 9.0, 0.5),
                  InsufficientDataError);
}

TEST_CASE("jittered 9 fps sinusoid keeps its spectral peak near 1.1 Hz") {
  // 99 samples across 11 s, like the irregular effective rate the drop
  // simulation produces
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> jitter(-0.03, 0.03);
  IppgSeries s;
  double t = 0.0;
  for (int i = 0; i < 99; ++i) {
    const double ti = i == 0 ? 0.0 : t + 1.0 / 9.0 + jitter(rng);
    t = ti;
    s.push(ti, std::sin(2.0 * M_PI * 1.1 * ti));
  }
  const UniformSeries u = resample_uniform(s, 9.0, 0.5);
  const Spectrum sp = spectrum(u, 4);
  const BandPeak peak = band_peak(sp, {0.8, 2.2});
  const double bin_width = sp.freqs_hz[1] - sp.freqs_hz[0];
  CHECK(std::fabs(peak.freq_hz - 1.1) <= bin_width);
}

TEST_CASE("spectrum of a bin-centred cosine leaks only into adjacent bins") {
  const double rate = 16.0;
  const int n = 64;  // no padding: zero_pad_factor 1 keeps bins natural
  const int tone_bin = 12;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = std::cos(2.0 * M_PI * tone_bin * i / static_cast<double>(n));
  }
  const Spectrum sp = spectrum(uniform_from(v, rate), 1);
  const double peak = sp.mags[tone_bin];
  REQUIRE(peak > 0.0);
  for (Eigen::Index k = 0; k < sp.mags.size(); ++k) {
    if (std::abs(static_cast<int>(k) - tone_bin) <= 1) continue;
    CHECK(sp.mags[k] < 0.01 * peak);
  }
}

TEST_CASE("spectrum of a constant input is zero after mean removal") {
  const Spectrum sp = spectrum(uniform_from(std::vector<double>(32, 3.25), 8.0), 2);
  for (Eigen::Index k = 0; k < sp.mags.size(); ++k) CHECK(sp.mags[k] < 1e-12);
}

TEST_CASE("spectrum matches the brute-force DFT oracle") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_int_distribution<int> len(8, 256);
  std::uniform_int_distribution<int> zpf(1, 4);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = len(rng);
    const int z = zpf(rng);
    std::vector<double> v(n);
    for (double& x : v) x = val(rng);
    const Spectrum sp = spectrum(uniform_from(v, 9.0), z);
    const std::vector<double> expect = oracle::spectrum_mags(v, z);
    REQUIRE(sp.mags.size() == static_cast<Eigen::Index>(expect.size()));
    double max_mag = 0.0;
    for (double m : expect) max_mag = std::max(max_mag, m);
    for (Eigen::Index k = 0; k < sp.mags.size(); ++k) {
      REQUIRE(std::fabs(sp.mags[k] - expect[k]) <= 1e-9 * max_mag);
    }
  }
}

TEST_CASE("spectrum obeys Parseval within 1e-6 relative") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 100;
    std::vector<double> v(n);
    for (double& x : v) x = val(rng);

    // windowed time-domain energy, recomputed independently
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double time_energy = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / static_cast<double>(n)));
      const double x = (v[i] - mean) * w;
      time_energy += x * x;
    }

    const Spectrum sp = spectrum(uniform_from(v, 9.0), 2);
    const Eigen::Index half = sp.mags.size() - 1;
    const double nfft = 2.0 * static_cast<double>(half);
    double spec_energy = sp.mags[0] * sp.mags[0] + sp.mags[half] * sp.mags[half];
    for (Eigen::Index k = 1; k < half; ++k) spec_energy += 2.0 * sp.mags[k] * sp.mags[k];
    spec_energy /= nfft;

    CHECK(spec_energy == doctest::Approx(time_energy).epsilon(1e-6));
  }
}

TEST_CASE("band_peak converts peak frequency to per-minute rate") {
  const double rate = 9.0;
  auto tone_spectrum = [&](double f_hz) {
    std::vector<double> v(99);
    for (int i = 0; i < 99; ++i) v[i] = std::sin(2.0 * M_PI * f_hz * i / rate);
    return spectrum(uniform_from(v, rate), 4);
  };

  SUBCASE("1.1 Hz tone reads as 66 bpm in the HR band") {
    const BandPeak p = band_peak(tone_spectrum(1.1), {0.8, 2.2});
    CHECK(std::fabs(p.rate_per_min - 66.0) <= 1.0);
  }
  SUBCASE("0.3 Hz tone reads as 18 per minute in the RR band") {
    const BandPeak p = band_peak(tone_spectrum(0.3), {0.18, 0.5});
    CHECK(std::fabs(p.rate_per_min - 18.0) <= 1.0);
  }
  SUBCASE("2.0 Hz tone reads as 120 bpm") {
    const BandPeak p = band_peak(tone_spectrum(2.0), {0.8, 2.2});
    CHECK(std::fabs(p.rate_per_min - 120.0) <= 1.0);
  }
  SUBCASE("rate_per_min is 60 times the refined frequency") {
    const BandPeak p = band_peak(tone_spectrum(1.37), {0.8, 2.2});
    CHECK(p.rate_per_min == doctest::Approx(60.0 * p.freq_hz).epsilon(1e-12));
  }
}

TEST_CASE("band_peak errors when the band holds no bin") {
  std::vector<double> v(16, 0.0);
  v[3] = 1.0;
  const Spectrum sp = spectrum(uniform_from(v, 8.0), 1);
  const double df = sp.freqs_hz[1] - sp.freqs_hz[0];
  CHECK_THROWS_AS(band_peak(sp, {0.25 * df, 0.5 * df}), BandResolutionError);
}

TEST_CASE("band_peak frequency is invariant under amplitude scaling") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<double> v(128);
  for (double& x : v) x = val(rng);
  const Spectrum a = spectrum(uniform_from(v, 9.0), 4);
  for (double& x : v) x *= 37.5;
  const Spectrum b = spectrum(uniform_from(v, 9.0), 4);
  const BandPeak pa = band_peak(a, {0.8, 2.2});
  const BandPeak pb = band_peak(b, {0.8, 2.2});
  CHECK(pa.freq_hz == doctest::Approx(pb.freq_hz).epsilon(1e-9));
}

TEST_CASE("band_filter isolates the in-band tone of a two-tone mix") {
  const double rate = 9.0;
  const int n = 199;
  std::vector<double> mix(n), pure(n);
  for (int i = 0; i < n; ++i) {
    const double t = i / rate;
    pure[i] = std::sin(2.0 * M_PI * 1.1 * t);
    mix[i] = pure[i] + std::sin(2.0 * M_PI * 0.3 * t);
  }
  const UniformSeries out = band_filter(uniform_from(mix, rate), {0.8, 2.2});
  REQUIRE(out.values.size() == n);

  // correlation over the middle 80%
  const int lo = n / 10, hi = n - n / 10;
  double sxy = 0, sxx = 0, syy = 0, sx = 0, sy = 0;
  const int m = hi - lo;
  for (int i = lo; i < hi; ++i) {
    sx += out.values[i];
    sy += pure[i];
  }
  const double mx = sx / m, my = sy / m;
  for (int i = lo; i < hi; ++i) {
    const double dx = out.values[i] - mx, dy = pure[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  CHECK(sxy / std::sqrt(sxx * syy) > 0.99);
}

TEST_CASE("band_filter leaves no energy outside the band") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<double> v(90);
  for (double& x : v) x = val(rng);
  const UniformSeries out = band_filter(uniform_from(v, 9.0), {0.8, 2.2});

  std::vector<double> filtered(out.values.data(), out.values.data() + out.values.size());
  const auto bins = oracle::brute_dft(filtered);
  const double df = 9.0 / static_cast<double>(bins.size());
  double in_band = 0.0, total = 0.0;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    const double f = std::min(static_cast<double>(k),
                              static_cast<double>(bins.size() - k)) * df;
    const double e = std::norm(bins[k]);
    total += e;
    if (f >= 0.8 && f <= 2.2) in_band += e;
  }
  CHECK(total - in_band < 0.01 * total);
}

TEST_CASE("band_filter of a constant input is all zero") {
  const UniformSeries out = band_filter(uniform_from(std::vector<double>(64, 7.0), 9.0),
                                        {0.8, 2.2});
  for (Eigen::Index i = 0; i < out.values.size(); ++i) {
    CHECK(std::fabs(out.values[i]) < 1e-9);
  }
}

TEST_CASE("planted-frequency recovery stays within 2 bpm at 10 dB SNR") {
  // 200 seeded trials, f uniform in (0.85, 2.15), 11 s window at 9 Hz
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> freq(0.85, 2.15);
  std::normal_distribution<double> noise(0.0, std::sqrt(0.05));  // 10 dB below a/sqrt(2)
  int hits = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const double f = freq(rng);
    std::vector<double> v(99);
    for (int i = 0; i < 99; ++i) {
      v[i] = std::sin(2.0 * M_PI * f * i / 9.0) + noise(rng);
    }
    const BandPeak p = band_peak(spectrum(uniform_from(v, 9.0), 4), {0.8, 2.2});
    if (std::fabs(p.rate_per_min - 60.0 * f) <= 2.0) ++hits;
  }
  CHECK(hits >= 190);
}
