#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "vitals/frame.hpp"

namespace vitals {

// Pull-based frame source. Single consumer; frames come out in index order
// with strictly increasing timestamps. Distinct sources may be read
// concurrently; decoded Frames are immutable values.
class FrameSource {
public:
  virtual ~FrameSource() = default;
  virtual const StreamMeta& meta() const = 0;
  virtual std::optional<Frame> next() = 0;
};

enum class FormatHint { auto_detect, y4m, image_sequence, raw_rgb };

// Opens a Y4M file, an image-sequence/raw-RGB meta JSON, or a directory
// containing meta.json. Detection by extension, then magic bytes.
// Throws IoError / FormatError / FrameSizeError.
std::unique_ptr<FrameSource> open_stream(const std::string& path,
                                         FormatHint hint = FormatHint::auto_detect);

// Independent Bernoulli keep/drop thinning of a stream, seeded. Original
// timestamps survive, so the retained grid is irregular; expected kept
// fraction equals keep_rate. keep_rate must lie in (0, 1].
std::unique_ptr<FrameSource> simulate_drops(std::unique_ptr<FrameSource> source,
                                            double keep_rate, std::uint64_t seed);

}  // namespace vitals
