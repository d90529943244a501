#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "vitals/color.hpp"
#include "vitals/frame.hpp"
#include "vitals/roi.hpp"

namespace vitals {

enum class SynthContainer { y4m420, y4m444, ppm_sequence };

// Multiplicative low-frequency brightness gain, sweeping the full
// [gain_min, gain_max] range sinusoidally.
struct DriftSpec {
  double gain_min = 0.7;
  double gain_max = 1.0;
  double freq_hz = 0.05;
  double phase_rad = 0.0;
};

struct SynthSpec {
  double hr_hz = 1.1;          // inside (0.8, 2.2)
  double rr_hz = 0.3;          // inside (0.18, 0.5)
  double hue_amp = 0.008;      // unit-interval hue units
  double green_amp = 2.0;      // 8-bit green units
  HsvPixel base_hsv{0.05, 0.35, 0.8};
  double noise_sigma = 0.0;    // per-pixel Gaussian sigma on each RGB channel
  std::optional<DriftSpec> brightness_drift;
  double fps = 30.0;
  double duration_s = 20.0;
  int width = 640;
  int height = 480;
  std::uint64_t seed = 0;
  SynthContainer container = SynthContainer::y4m420;

  void validate() const;  // throws ConfigError on invariant violations
};

struct GroundTruth {
  double hr_bpm = 0.0;
  double rr_bpm = 0.0;
  ForeheadRect forehead_rect;
  std::vector<double> mean_hue_trace;  // planted per-frame hue, pre-quantization

  // artifact paths, for chaining straight into ingest
  std::string stream_path;
  std::string landmarks_path;
  std::string truth_path;
};

// Renders the clip into out_dir (stream + landmark sidecar + truth JSON).
// The forehead rectangle carries the planted hue/green oscillation:
//   h(t) = base_h + hue_amp*sin(2*pi*hr_hz*t) + (hue_amp/2)*sin(2*pi*rr_hz*t)
// with an analogous green-channel modulation applied through the value
// channel so hue stays untouched. Deterministic for a fixed seed.
GroundTruth generate(const SynthSpec& spec, const std::string& out_dir);

// BT.601 Y4M writer used by generate and by round-trip tests.
class Y4mWriter {
public:
  enum class Subsampling { c420, c444 };

  Y4mWriter(const std::string& path, int width, int height, double fps,
            Subsampling subsampling, YuvRange range);
  void write(const Frame& f);

private:
  std::ofstream out_;
  int width_;
  int height_;
  Subsampling subsampling_;
  YuvRange range_;
};

void write_ppm(const std::string& path, const Frame& f);

}  // namespace vitals
