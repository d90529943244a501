#include "vitals/color.hpp"

#include <algorithm>
#include <cmath>

#include "vitals/error.hpp"

namespace vitals {

namespace {

std::uint8_t clamp_u8(double x) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(x), 0L, 255L));
}

}  // namespace

HsvPixel rgb_to_hsv(RgbPixel p) {
  const int mx = std::max({p.r, p.g, p.b});
  const int mn = std::min({p.r, p.g, p.b});
  const int delta = mx - mn;

  HsvPixel out;
  out.v = mx / 255.0;
  if (mx == 0 || delta == 0) {
    return out;  // achromatic: s = 0, canonical h = 0
  }
  out.s = static_cast<double>(delta) / mx;

  double h6;
  if (mx == p.r) {
    h6 = std::fmod(static_cast<double>(p.g - p.b) / delta + 6.0, 6.0);
  } else if (mx == p.g) {
    h6 = static_cast<double>(p.b - p.r) / delta + 2.0;
  } else {
    h6 = static_cast<double>(p.r - p.g) / delta + 4.0;
  }
  out.h = h6 / 6.0;
  if (out.h >= 1.0) out.h -= 1.0;
  return out;
}

RgbPixel hsv_to_rgb(const HsvPixel& p) {
  const double v = p.v * 255.0;
  if (p.s <= 0.0) {
    const std::uint8_t g = clamp_u8(v);
    return {g, g, g};
  }
  const double h6 = std::fmod(p.h, 1.0) * 6.0;
  const int sector = std::min(static_cast<int>(h6), 5);
  const double f = h6 - sector;
  const double lo = v * (1.0 - p.s);
  const double dn = v * (1.0 - p.s * f);
  const double up = v * (1.0 - p.s * (1.0 - f));

  double r, g, b;
  switch (sector) {
    case 0: r = v;  g = up; b = lo; break;
    case 1: r = dn; g = v;  b = lo; break;
    case 2: r = lo; g = v;  b = up; break;
    case 3: r = lo; g = dn; b = v;  break;
    case 4: r = up; g = lo; b = v;  break;
    default: r = v; g = lo; b = dn; break;
  }
  return {clamp_u8(r), clamp_u8(g), clamp_u8(b)};
}

RgbPixel yuv_to_rgb(std::uint8_t y, std::uint8_t u, std::uint8_t v, YuvRange range) {
  const double d = u - 128.0;
  const double e = v - 128.0;
  double r, g, b;
  if (range == YuvRange::limited) {
    const double c = y - 16.0;
    r = 1.164383 * c + 1.596027 * e;
    g = 1.164383 * c - 0.391762 * d - 0.812968 * e;
    b = 1.164383 * c + 2.017232 * d;
  } else {
    r = y + 1.402 * e;
    g = y - 0.344136 * d - 0.714136 * e;
    b = y + 1.772 * d;
  }
  return {clamp_u8(r), clamp_u8(g), clamp_u8(b)};
}

void rgb_to_yuv(RgbPixel p, YuvRange range,
                std::uint8_t& y, std::uint8_t& u, std::uint8_t& v) {
  if (range == YuvRange::limited) {
    y = clamp_u8(16.0 + (65.481 * p.r + 128.553 * p.g + 24.966 * p.b) / 255.0);
    u = clamp_u8(128.0 + (-37.797 * p.r - 74.203 * p.g + 112.0 * p.b) / 255.0);
    v = clamp_u8(128.0 + (112.0 * p.r - 93.786 * p.g - 18.214 * p.b) / 255.0);
  } else {
    const double yf = 0.299 * p.r + 0.587 * p.g + 0.114 * p.b;
    y = clamp_u8(yf);
    u = clamp_u8(128.0 + (p.b - yf) / 1.772);
    v = clamp_u8(128.0 + (p.r - yf) / 1.402);
  }
}

void yuv420_to_rgb(const std::uint8_t* y_plane, const std::uint8_t* u_plane,
                   const std::uint8_t* v_plane, int width, int height,
                   YuvRange range, std::uint8_t* rgb_out) {
  if (width <= 0 || height <= 0 || width % 2 != 0 || height % 2 != 0) {
    throw FormatError("yuv420_to_rgb: dimensions " + std::to_string(width) + "x" +
                      std::to_string(height) + " are not valid for 4:2:0");
  }
  const int cw = width / 2;
  for (int row = 0; row < height; ++row) {
    const std::uint8_t* yrow = y_plane + static_cast<std::size_t>(row) * width;
    const std::uint8_t* urow = u_plane + static_cast<std::size_t>(row / 2) * cw;
    const std::uint8_t* vrow = v_plane + static_cast<std::size_t>(row / 2) * cw;
    std::uint8_t* out = rgb_out + static_cast<std::size_t>(row) * width * 3;
    for (int col = 0; col < width; ++col) {
      const RgbPixel p = yuv_to_rgb(yrow[col], urow[col / 2], vrow[col / 2], range);
      out[col * 3 + 0] = p.r;
      out[col * 3 + 1] = p.g;
      out[col * 3 + 2] = p.b;
    }
  }
}

double hue_distance(double a, double b) {
  const double d = std::fabs(a - b);
  return std::min(d, 1.0 - d);
}

}  // namespace vitals
