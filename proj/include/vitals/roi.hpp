#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vitals/frame.hpp"

namespace vitals {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct FaceBox {
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;
};

// 68-point landmark scheme; indices 21 and 24 are the inner eyebrow ends
// that bound the forehead horizontally.
struct LandmarkSet {
  std::int64_t frame_index = 0;
  FaceBox face_box;
  std::array<Point2, 68> points{};
};

inline constexpr int kBrowLeft = 21;
inline constexpr int kBrowRight = 24;

// Half-open pixel rectangle: [left, right) x [top, bottom).
struct ForeheadRect {
  int left = 0;
  int top = 0;
  int right = 0;
  int bottom = 0;

  int width() const { return right - left; }
  int height() const { return bottom - top; }
  long area() const { return static_cast<long>(width()) * height(); }
};

// Hue interval on [0, 1), bounds exclusive. wrap means the interval crosses 0
// (pass when h > lo or h < hi).
struct HueMask {
  double lo = 0.0;
  double hi = 0.1;
  bool wrap = false;

  bool passes(double h) const {
    return wrap ? (h > lo || h < hi) : (h > lo && h < hi);
  }
};

enum class Channel { hue, green };

// One scalar observation per frame. pixel_count == 0 means no usable pixels;
// such samples must not enter the iPPG series.
struct RoiSample {
  double timestamp_s = 0.0;
  double value = 0.0;
  long pixel_count = 0;
  Channel channel = Channel::hue;
};

// Forehead rule: horizontal span between landmarks 21 and 24, vertical span
// from the face-box top down to the higher of the two eyebrow points.
// Clamped to the frame; throws GeometryError when degenerate.
ForeheadRect forehead_from_landmarks(const LandmarkSet& lm, int frame_w, int frame_h);

// Arithmetic mean of hue over rect pixels that pass the mask. pixel_count = 0
// is a valid output, not an error.
RoiSample mean_hue_masked(const Frame& frame, const ForeheadRect& rect, const HueMask& mask);

// Mean of the green channel over all rect pixels (no mask).
RoiSample mean_green(const Frame& frame, const ForeheadRect& rect);

// Landmark sidecar, one JSON object per line:
//   {"frame": int, "face_box": [l, t, r, b], "points": [[x, y] x 68]}
// Frames absent from the file simply have no entry (no face).
// Throws ParseError naming the offending line.
std::vector<LandmarkSet> parse_landmark_sidecar(const std::string& path);

}  // namespace vitals
