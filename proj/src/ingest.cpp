#include "vitals/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "vitals/error.hpp"

namespace fs = std::filesystem;

namespace vitals {

namespace {

enum class Y4mColor { c420, c444 };

std::string read_header_line(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError("y4m: missing header line");
  }
  return line;
}

// ---------------------------------------------------------------- Y4M reader

class Y4mSource final : public FrameSource {
public:
  explicit Y4mSource(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open " + path);
    parse_header(path);
  }

  const StreamMeta& meta() const override { return meta_; }

  std::optional<Frame> next() override {
    std::string line;
    if (!std::getline(in_, line)) return std::nullopt;  // clean EOF
    if (line.rfind("FRAME", 0) != 0) {
      throw FormatError("y4m: expected FRAME marker at frame " + std::to_string(index_));
    }
    const std::size_t luma = static_cast<std::size_t>(meta_.width) * meta_.height;
    const std::size_t chroma = color_ == Y4mColor::c444 ? luma : luma / 4;
    y_.resize(luma);
    u_.resize(chroma);
    v_.resize(chroma);
    if (!read_plane(y_) || !read_plane(u_) || !read_plane(v_)) {
      throw FormatError("y4m: truncated frame " + std::to_string(index_));
    }

    Frame f;
    f.index = index_;
    f.timestamp_s = index_ / meta_.nominal_fps;
    f.width = meta_.width;
    f.height = meta_.height;
    f.pixels.resize(luma * 3);
    if (color_ == Y4mColor::c444) {
      for (std::size_t i = 0; i < luma; ++i) {
        const RgbPixel p = yuv_to_rgb(y_[i], u_[i], v_[i], range_);
        f.pixels[i * 3 + 0] = p.r;
        f.pixels[i * 3 + 1] = p.g;
        f.pixels[i * 3 + 2] = p.b;
      }
    } else {
      yuv420_to_rgb(y_.data(), u_.data(), v_.data(), meta_.width, meta_.height,
                    range_, f.pixels.data());
    }
    ++index_;
    return f;
  }

private:
  bool read_plane(std::vector<std::uint8_t>& plane) {
    in_.read(reinterpret_cast<char*>(plane.data()),
             static_cast<std::streamsize>(plane.size()));
    return static_cast<std::size_t>(in_.gcount()) == plane.size();
  }

  void parse_header(const std::string& path) {
    const std::string header = read_header_line(in_);
    std::istringstream tokens(header);
    std::string tok;
    tokens >> tok;
    if (tok != "YUV4MPEG2") {
      throw FormatError("y4m: bad magic in " + path);
    }
    int width = 0, height = 0;
    double fps = 0.0;
    bool saw_rate = false;
    while (tokens >> tok) {
      if (tok.empty()) continue;
      switch (tok[0]) {
        case 'W': width = std::stoi(tok.substr(1)); break;
        case 'H': height = std::stoi(tok.substr(1)); break;
        case 'F': {
          const auto colon = tok.find(':');
          if (colon == std::string::npos) throw FormatError("y4m: bad rate " + tok);
          const double num = std::stod(tok.substr(1, colon - 1));
          const double den = std::stod(tok.substr(colon + 1));
          if (num <= 0 || den <= 0) throw FormatError("y4m: bad rate " + tok);
          fps = num / den;
          saw_rate = true;
          break;
        }
        case 'C':
          if (tok == "C444") {
            color_ = Y4mColor::c444;
          } else if (tok.rfind("C420", 0) == 0) {
            color_ = Y4mColor::c420;
          } else {
            throw FormatError("y4m: unsupported colorspace " + tok);
          }
          break;
        case 'X':
          if (tok == "XCOLORRANGE=FULL") range_ = YuvRange::full;
          else if (tok == "XCOLORRANGE=LIMITED") range_ = YuvRange::limited;
          break;
        default:
          break;  // interlacing / aspect tags are irrelevant here
      }
    }
    if (width <= 0 || height <= 0 || !saw_rate) {
      throw FormatError("y4m: header missing W/H/F in " + path);
    }
    if (color_ == Y4mColor::c420 && (width % 2 != 0 || height % 2 != 0)) {
      throw FormatError("y4m: odd dimensions with 4:2:0 in " + path);
    }
    meta_.width = width;
    meta_.height = height;
    meta_.nominal_fps = fps;
    meta_.source_kind = SourceKind::y4m;
  }

  std::ifstream in_;
  StreamMeta meta_;
  Y4mColor color_ = Y4mColor::c420;
  YuvRange range_ = YuvRange::limited;
  std::int64_t index_ = 0;
  std::vector<std::uint8_t> y_, u_, v_;
};

// ------------------------------------------------- numbered-file sequences

std::string format_pattern(const std::string& pattern, std::int64_t index) {
  char buf[512];
  const int n = std::snprintf(buf, sizeof(buf), pattern.c_str(),
                              static_cast<int>(index));
  if (n <= 0 || n >= static_cast<int>(sizeof(buf))) {
    throw FormatError("sequence: bad filename pattern " + pattern);
  }
  return std::string(buf, static_cast<std::size_t>(n));
}

void validate_pattern(const std::string& pattern) {
  int conversions = 0;
  for (std::size_t i = 0; i + 1 < pattern.size(); ++i) {
    if (pattern[i] != '%') continue;
    if (pattern[i + 1] == '%') {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < pattern.size() && std::isdigit(static_cast<unsigned char>(pattern[j]))) {
      ++j;
    }
    if (j >= pattern.size() || pattern[j] != 'd') {
      throw FormatError("sequence: pattern must use a %d conversion: " + pattern);
    }
    ++conversions;
    i = j;
  }
  if (conversions != 1) {
    throw FormatError("sequence: pattern needs exactly one %d conversion: " + pattern);
  }
}

Frame read_ppm(const std::string& path, std::int64_t index) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P6") throw FormatError("ppm: bad magic in " + path);
  auto next_int = [&in, &path]() {
    // skip whitespace and '#' comments between header fields
    int c = in.peek();
    while (c == '#' || std::isspace(c)) {
      if (c == '#') {
        std::string comment;
        std::getline(in, comment);
      } else {
        in.get();
      }
      c = in.peek();
    }
    int value = 0;
    if (!(in >> value)) throw FormatError("ppm: truncated header in " + path);
    return value;
  };
  const int width = next_int();
  const int height = next_int();
  const int maxval = next_int();
  if (width <= 0 || height <= 0) throw FormatError("ppm: bad dimensions in " + path);
  if (maxval != 255) throw FormatError("ppm: only maxval 255 supported, got " +
                                       std::to_string(maxval) + " in " + path);
  in.get();  // single whitespace byte after maxval

  Frame f;
  f.index = index;
  f.width = width;
  f.height = height;
  f.pixels.resize(static_cast<std::size_t>(width) * height * 3);
  in.read(reinterpret_cast<char*>(f.pixels.data()),
          static_cast<std::streamsize>(f.pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != f.pixels.size()) {
    throw FormatError("ppm: truncated pixel data in " + path);
  }
  return f;
}

Frame read_raw_rgb(const std::string& path, std::int64_t index, int width, int height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  Frame f;
  f.index = index;
  f.width = width;
  f.height = height;
  f.pixels.resize(static_cast<std::size_t>(width) * height * 3);
  in.read(reinterpret_cast<char*>(f.pixels.data()),
          static_cast<std::streamsize>(f.pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != f.pixels.size()) {
    throw FrameSizeError("raw: " + path + " shorter than " +
                         std::to_string(f.pixels.size()) + " bytes");
  }
  return f;
}

class SequenceSource final : public FrameSource {
public:
  SequenceSource(const std::string& meta_path, bool raw_rgb) : raw_(raw_rgb) {
    std::ifstream in(meta_path);
    if (!in) throw IoError("cannot open " + meta_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("sequence: bad meta JSON " + meta_path + ": " + e.what());
    }
    if (!j.contains("fps") || !j.contains("width") || !j.contains("height") ||
        !j.contains("pattern")) {
      throw FormatError("sequence: meta needs fps/width/height/pattern: " + meta_path);
    }
    meta_.nominal_fps = j.at("fps").get<double>();
    meta_.width = j.at("width").get<int>();
    meta_.height = j.at("height").get<int>();
    meta_.source_kind = raw_ ? SourceKind::raw_rgb : SourceKind::image_sequence;
    if (meta_.nominal_fps <= 0) throw FormatError("sequence: fps must be > 0");
    if (meta_.width <= 0 || meta_.height <= 0) {
      throw FormatError("sequence: bad dimensions in " + meta_path);
    }
    if (raw_ && j.value("pixel_format", "rgb24") != "rgb24") {
      throw FormatError("sequence: unsupported pixel_format in " + meta_path);
    }
    pattern_ = j.at("pattern").get<std::string>();
    validate_pattern(pattern_);
    dir_ = fs::path(meta_path).parent_path();
    // tolerate 1-based numbering
    if (!fs::exists(dir_ / format_pattern(pattern_, 0)) &&
        fs::exists(dir_ / format_pattern(pattern_, 1))) {
      number_base_ = 1;
    }
    if (j.contains("frames")) meta_.frame_count = j.at("frames").get<std::int64_t>();
  }

  const StreamMeta& meta() const override { return meta_; }

  std::optional<Frame> next() override {
    const fs::path p = dir_ / format_pattern(pattern_, index_ + number_base_);
    if (!fs::exists(p)) {
      if (meta_.frame_count && index_ < *meta_.frame_count) {
        throw IoError("sequence: missing frame file " + p.string());
      }
      return std::nullopt;
    }
    Frame f = raw_ ? read_raw_rgb(p.string(), index_, meta_.width, meta_.height)
                   : read_ppm(p.string(), index_);
    if (f.width != meta_.width || f.height != meta_.height) {
      throw FrameSizeError("sequence: " + p.string() + " is " + std::to_string(f.width) +
                           "x" + std::to_string(f.height) + ", meta says " +
                           std::to_string(meta_.width) + "x" + std::to_string(meta_.height));
    }
    f.timestamp_s = index_ / meta_.nominal_fps;
    ++index_;
    return f;
  }

private:
  bool raw_;
  StreamMeta meta_;
  std::string pattern_;
  fs::path dir_;
  std::int64_t index_ = 0;
  std::int64_t number_base_ = 0;
};

// ----------------------------------------------------------- drop filtering

class DropSource final : public FrameSource {
public:
  DropSource(std::unique_ptr<FrameSource> inner, double keep_rate, std::uint64_t seed)
      : inner_(std::move(inner)), keep_rate_(keep_rate), rng_(seed) {
    meta_ = inner_->meta();
    meta_.frame_count.reset();  // kept count is random
  }

  const StreamMeta& meta() const override { return meta_; }

  std::optional<Frame> next() override {
    while (auto f = inner_->next()) {
      // portable 53-bit uniform draw on [0, 1)
      const double u = (rng_() >> 11) * 0x1.0p-53;
      if (u < keep_rate_) return f;
    }
    return std::nullopt;
  }

private:
  std::unique_ptr<FrameSource> inner_;
  double keep_rate_;
  std::mt19937_64 rng_;
  StreamMeta meta_;
};

bool looks_like_y4m(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[9] = {};
  in.read(magic, 9);
  return in.gcount() == 9 && std::string(magic, 9) == "YUV4MPEG2";
}

}  // namespace

std::unique_ptr<FrameSource> open_stream(const std::string& path, FormatHint hint) {
  fs::path p(path);
  if (!fs::exists(p)) throw IoError("no such path: " + path);

  std::string target = path;
  if (fs::is_directory(p)) {
    target = (p / "meta.json").string();
    if (!fs::exists(target)) throw IoError("directory has no meta.json: " + path);
    if (hint == FormatHint::auto_detect) hint = FormatHint::image_sequence;
  }

  if (hint == FormatHint::auto_detect) {
    const std::string ext = fs::path(target).extension().string();
    if (ext == ".y4m") {
      hint = FormatHint::y4m;
    } else if (ext == ".json") {
      hint = FormatHint::image_sequence;
    } else if (looks_like_y4m(target)) {
      hint = FormatHint::y4m;
    } else {
      throw FormatError("cannot detect stream format of " + path);
    }
  }

  if (hint == FormatHint::image_sequence || hint == FormatHint::raw_rgb) {
    // pixel_format decides between PPM and raw; the hint is a tie-breaker only
    std::ifstream in(target);
    if (!in) throw IoError("cannot open " + target);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("sequence: bad meta JSON " + target + ": " + e.what());
    }
    const bool raw = j.value("pixel_format", "") == "rgb24" || hint == FormatHint::raw_rgb;
    return std::make_unique<SequenceSource>(target, raw);
  }
  return std::make_unique<Y4mSource>(target);
}

std::unique_ptr<FrameSource> simulate_drops(std::unique_ptr<FrameSource> source,
                                            double keep_rate, std::uint64_t seed) {
  if (!(keep_rate > 0.0 && keep_rate <= 1.0)) {
    throw ConfigError("keep_rate must lie in (0, 1], got " + std::to_string(keep_rate));
  }
  if (keep_rate == 1.0) return source;  // identity
  return std::make_unique<DropSource>(std::move(source), keep_rate, seed);
}

}  // namespace vitals
