#pragma once

#include <cstdint>

namespace vitals {

struct RgbPixel {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
};

// Hue lives on the unit interval [0, 1) (so 0.1 == 36 degrees); saturation and
// value on [0, 1]. Achromatic pixels (s == 0) carry the canonical hue 0.
struct HsvPixel {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;
};

// BT.601 quantization range. Limited is the Y4M default (Y on 16..235),
// full puts all planes on 0..255.
enum class YuvRange { limited, full };

// Standard hexcone model: v = max/255, s = (max-min)/max, h from the
// dominant-channel sector. Total function, no failure modes.
HsvPixel rgb_to_hsv(RgbPixel p);

// Inverse hexcone conversion, channels rounded to the nearest 8-bit value.
RgbPixel hsv_to_rgb(const HsvPixel& p);

// Single-sample BT.601 YUV -> RGB, output clamped to [0, 255].
RgbPixel yuv_to_rgb(std::uint8_t y, std::uint8_t u, std::uint8_t v, YuvRange range);

// Single-sample BT.601 RGB -> YUV (the Y4M writer path).
void rgb_to_yuv(RgbPixel p, YuvRange range,
                std::uint8_t& y, std::uint8_t& u, std::uint8_t& v);

// Planar 4:2:0 -> packed RGB24 with nearest-neighbour chroma upsampling.
// rgb_out must hold width*height*3 bytes. Throws FormatError when the
// dimensions are not even as 4:2:0 requires.
void yuv420_to_rgb(const std::uint8_t* y_plane, const std::uint8_t* u_plane,
                   const std::uint8_t* v_plane, int width, int height,
                   YuvRange range, std::uint8_t* rgb_out);

// Circular distance between two hues on [0, 1).
double hue_distance(double a, double b);

}  // namespace vitals
