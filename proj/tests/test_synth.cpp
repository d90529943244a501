#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "vitals/error.hpp"
#include "vitals/ingest.hpp"
#include "vitals/roi.hpp"
#include "vitals/synth.hpp"

using namespace vitals;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// masked mean-hue trace as the pipeline would measure it
std::vector<double> measure_hue_trace(const GroundTruth& truth) {
  auto stream = open_stream(truth.stream_path);
  const auto landmarks = parse_landmark_sidecar(truth.landmarks_path);
  REQUIRE(!landmarks.empty());
  std::vector<double> trace;
  while (auto frame = stream->next()) {
    const ForeheadRect rect =
        forehead_from_landmarks(landmarks[static_cast<std::size_t>(frame->index)],
                                frame->width, frame->height);
    trace.push_back(mean_hue_masked(*frame, rect, HueMask{0.0, 0.1, false}).value);
  }
  return trace;
}

std::vector<double> measure_green_trace(const GroundTruth& truth) {
  auto stream = open_stream(truth.stream_path);
  const auto landmarks = parse_landmark_sidecar(truth.landmarks_path);
  std::vector<double> trace;
  while (auto frame = stream->next()) {
    const ForeheadRect rect =
        forehead_from_landmarks(landmarks[static_cast<std::size_t>(frame->index)],
                                frame->width, frame->height);
    trace.push_back(mean_green(*frame, rect).value);
  }
  return trace;
}

}  // namespace

TEST_CASE("9 fps for 11 seconds yields 99 frames") {
  oracle::TempDir dir("synth_count");
  SynthSpec spec;
  spec.fps = 9.0;
  spec.duration_s = 11.0;
  spec.width = 64;
  spec.height = 48;
  spec.container = SynthContainer::ppm_sequence;
  const GroundTruth truth = generate(spec, dir.str());
  CHECK(truth.mean_hue_trace.size() == 99);

  auto stream = open_stream(truth.stream_path);
  int frames = 0;
  while (stream->next()) ++frames;
  CHECK(frames == 99);
}

TEST_CASE("zero modulation plants a perfectly flat hue trace") {
  oracle::TempDir dir("synth_flat");
  SynthSpec spec;
  spec.hue_amp = 0.0;
  spec.green_amp = 0.0;
  spec.fps = 9.0;
  spec.duration_s = 2.0;
  spec.width = 64;
  spec.height = 48;
  spec.container = SynthContainer::ppm_sequence;
  const GroundTruth truth = generate(spec, dir.str());
  for (double h : truth.mean_hue_trace) CHECK(h == spec.base_hsv.h);
}

TEST_CASE("green channel at phase zero equals the planted baseline") {
  oracle::TempDir dir("synth_green0");
  SynthSpec spec;
  spec.fps = 9.0;
  spec.duration_s = 1.0;
  spec.width = 96;
  spec.height = 72;
  spec.noise_sigma = 0.0;
  spec.container = SynthContainer::ppm_sequence;
  const GroundTruth truth = generate(spec, dir.str());

  auto stream = open_stream(truth.stream_path);
  const auto frame = stream->next();
  REQUIRE(frame.has_value());
  const RoiSample s = mean_green(*frame, truth.forehead_rect);
  // both oscillations are sin terms, so frame 0 carries the pure base color
  const RgbPixel base = hsv_to_rgb(spec.base_hsv);
  CHECK(s.value == doctest::Approx(static_cast<double>(base.g)));
  CHECK(s.pixel_count == truth.forehead_rect.area());
}

TEST_CASE("fixed seed reproduces byte-identical outputs") {
  oracle::TempDir a("synth_det_a"), b("synth_det_b");
  SynthSpec spec;
  spec.fps = 9.0;
  spec.duration_s = 3.0;
  spec.width = 64;
  spec.height = 48;
  spec.noise_sigma = 2.0;
  spec.seed = 42;
  const GroundTruth ta = generate(spec, a.str());
  const GroundTruth tb = generate(spec, b.str());
  CHECK(slurp(ta.stream_path) == slurp(tb.stream_path));
  CHECK(slurp(ta.landmarks_path) == slurp(tb.landmarks_path));
  CHECK(slurp(ta.truth_path) == slurp(tb.truth_path));
}

TEST_CASE("sidecar landmarks reproduce the planted forehead rect exactly") {
  oracle::TempDir dir("synth_rect");
  SynthSpec spec;
  spec.fps = 9.0;
  spec.duration_s = 1.0;
  spec.width = 128;
  spec.height = 96;
  spec.container = SynthContainer::ppm_sequence;
  const GroundTruth truth = generate(spec, dir.str());

  const auto landmarks = parse_landmark_sidecar(truth.landmarks_path);
  REQUIRE(!landmarks.empty());
  const ForeheadRect rect =
      forehead_from_landmarks(landmarks[0], spec.width, spec.height);
  CHECK(rect.left == truth.forehead_rect.left);
  CHECK(rect.top == truth.forehead_rect.top);
  CHECK(rect.right == truth.forehead_rect.right);
  CHECK(rect.bottom == truth.forehead_rect.bottom);
}

TEST_CASE("ppm stream read back through ingest+roi matches the planted trace") {
  oracle::TempDir dir("synth_trace");
  SynthSpec spec;
  spec.fps = 9.0;
  spec.duration_s = 5.0;
  spec.width = 96;
  spec.height = 72;
  spec.noise_sigma = 0.0;
  spec.container = SynthContainer::ppm_sequence;
  const GroundTruth truth = generate(spec, dir.str());

  const auto measured = measure_hue_trace(truth);
  REQUIRE(measured.size() == truth.mean_hue_trace.size());
  for (std::size_t i = 0; i < measured.size(); ++i) {
    CHECK(std::fabs(measured[i] - truth.mean_hue_trace[i]) <= 0.002);
  }
}

TEST_CASE("brightness drift barely moves hue while green swings") {
  oracle::TempDir still_dir("synth_still"), drift_dir("synth_drift");
  SynthSpec spec;
  spec.fps = 9.0;
  spec.duration_s = 20.0;  // one full 0.05 Hz drift period
  spec.width = 96;
  spec.height = 72;
  spec.noise_sigma = 0.0;
  spec.container = SynthContainer::ppm_sequence;
  const GroundTruth still = generate(spec, still_dir.str());
  spec.brightness_drift = DriftSpec{0.7, 1.0, 0.05};
  const GroundTruth drifted = generate(spec, drift_dir.str());

  const auto hue_still = measure_hue_trace(still);
  const auto hue_drift = measure_hue_trace(drifted);
  const auto green_still = measure_green_trace(still);
  const auto green_drift = measure_green_trace(drifted);

  double worst_hue = 0.0, worst_green = 0.0;
  for (std::size_t i = 0; i < hue_still.size(); ++i) {
    worst_hue = std::max(worst_hue, std::fabs(hue_drift[i] - hue_still[i]));
    worst_green = std::max(worst_green, std::fabs(green_drift[i] - green_still[i]));
  }
  CHECK(worst_hue < 0.01);
  CHECK(worst_green > 10.0 * spec.green_amp);
}

TEST_CASE("spec invariants are enforced") {
  SynthSpec spec;
  SUBCASE("hr band") {
    spec.hr_hz = 2.5;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
  }
  SUBCASE("rr band") {
    spec.rr_hz = 0.6;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
  }
  SUBCASE("hue excursion must stay inside the mask") {
    spec.base_hsv.h = 0.095;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
  }
  SUBCASE("drift gains") {
    spec.brightness_drift = DriftSpec{0.0, 1.0, 0.05};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
  }
}

TEST_CASE("y4m 4:4:4 synth clip still lands near the planted trace") {
  oracle::TempDir dir("synth_y4m");
  SynthSpec spec;
  spec.fps = 9.0;
  spec.duration_s = 3.0;
  spec.width = 96;
  spec.height = 72;
  spec.container = SynthContainer::y4m444;
  const GroundTruth truth = generate(spec, dir.str());
  const auto measured = measure_hue_trace(truth);
  REQUIRE(measured.size() == truth.mean_hue_trace.size());
  for (std::size_t i = 0; i < measured.size(); ++i) {
    // one extra quantization hop through YUV on top of the RGB rounding
    CHECK(std::fabs(measured[i] - truth.mean_hue_trace[i]) <= 0.006);
  }
}
