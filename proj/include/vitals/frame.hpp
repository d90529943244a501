#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vitals/color.hpp"

namespace vitals {

enum class SourceKind { y4m, image_sequence, raw_rgb };

// One decoded frame: row-major packed RGB8, length width*height*3.
// Timestamps are seconds since stream start and strictly increase with index.
struct Frame {
  std::int64_t index = 0;
  double timestamp_s = 0.0;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RgbPixel at(int x, int y) const {
    const std::size_t off = (static_cast<std::size_t>(y) * width + x) * 3;
    return {pixels[off], pixels[off + 1], pixels[off + 2]};
  }
  void set(int x, int y, RgbPixel p) {
    const std::size_t off = (static_cast<std::size_t>(y) * width + x) * 3;
    pixels[off] = p.r;
    pixels[off + 1] = p.g;
    pixels[off + 2] = p.b;
  }
};

struct StreamMeta {
  double nominal_fps = 0.0;
  int width = 0;
  int height = 0;
  std::optional<std::int64_t> frame_count;
  SourceKind source_kind = SourceKind::y4m;
};

}  // namespace vitals
