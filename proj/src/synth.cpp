#include "vitals/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <numbers>
#include <numeric>
#include <random>

#include <json.hpp>

#include "vitals/error.hpp"

namespace fs = std::filesystem;

namespace vitals {

namespace {

// float-precision hexcone conversion; the 8-bit quantization happens at
// render time so the modulation is not staircased before noise is added
void hsv_to_rgb_f(double h, double s, double v, double& r, double& g, double& b) {
  const double vv = v * 255.0;
  if (s <= 0.0) {
    r = g = b = vv;
    return;
  }
  const double h6 = std::fmod(h, 1.0) * 6.0;
  const int sector = std::min(static_cast<int>(h6), 5);
  const double f = h6 - sector;
  const double lo = vv * (1.0 - s);
  const double dn = vv * (1.0 - s * f);
  const double up = vv * (1.0 - s * (1.0 - f));
  switch (sector) {
    case 0: r = vv; g = up; b = lo; break;
    case 1: r = dn; g = vv; b = lo; break;
    case 2: r = lo; g = vv; b = up; break;
    case 3: r = lo; g = dn; b = vv; break;
    case 4: r = up; g = lo; b = vv; break;
    default: r = vv; g = lo; b = dn; break;
  }
}

std::uint8_t quantize(double x) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(x), 0L, 255L));
}

// splitmix64, mixes the clip seed with the frame index so frames can be
// rendered in any order
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t frame) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (frame + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class GaussianSource {
public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // Box-Muller on explicit 53-bit uniforms keeps the stream portable
    double u1 = (rng_() >> 11) * 0x1.0p-53;
    const double u2 = (rng_() >> 11) * 0x1.0p-53;
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

struct FaceLayout {
  LandmarkSet landmarks;  // integer coordinates
  ForeheadRect forehead;
  int ellipse_cx, ellipse_cy;
  double ellipse_a, ellipse_b;
};

FaceLayout make_face_layout(int w, int h) {
  const double cx = w / 2.0;
  const double cy = h * 0.52;
  const double a = w * 0.24;  // semi-axes
  const double b = h * 0.34;

  auto px = [](double v) { return std::round(v); };

  FaceLayout fl;
  fl.ellipse_cx = static_cast<int>(px(cx));
  fl.ellipse_cy = static_cast<int>(px(cy));
  fl.ellipse_a = a;
  fl.ellipse_b = b;

  LandmarkSet& lm = fl.landmarks;
  lm.face_box = {px(cx - a), px(cy - b), px(cx + a), px(cy + b)};

  // jaw 0..16 along the lower half of the ellipse
  for (int i = 0; i <= 16; ++i) {
    const double phi = std::numbers::pi * i / 16.0;
    lm.points[i] = {px(cx - a * std::cos(phi)), px(cy + b * std::sin(phi))};
  }
  // eyebrows 17..26; 21 and 24 bound the forehead
  const double brow_y = cy - 0.45 * b;
  const double left_xs[5] = {-0.62, -0.54, -0.46, -0.38, -0.30};
  const double right_xs[5] = {0.10, 0.20, 0.30, 0.45, 0.60};
  for (int i = 0; i < 5; ++i) {
    lm.points[17 + i] = {px(cx + left_xs[i] * a), px(brow_y)};
    lm.points[22 + i] = {px(cx + right_xs[i] * a), px(brow_y - 1.0)};
  }
  // nose 27..35
  for (int i = 0; i < 4; ++i) {
    lm.points[27 + i] = {px(cx), px(cy - 0.30 * b + i * 0.12 * b)};
  }
  for (int i = 0; i < 5; ++i) {
    lm.points[31 + i] = {px(cx + (i - 2) * 0.08 * a), px(cy + 0.22 * b)};
  }
  // eyes 36..47
  for (int i = 0; i < 6; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / 6.0;
    lm.points[36 + i] = {px(cx - 0.40 * a + 0.12 * a * std::cos(phi)),
                         px(cy - 0.18 * b + 0.06 * b * std::sin(phi))};
    lm.points[42 + i] = {px(cx + 0.40 * a + 0.12 * a * std::cos(phi)),
                         px(cy - 0.18 * b + 0.06 * b * std::sin(phi))};
  }
  // mouth 48..67
  for (int i = 0; i < 12; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / 12.0;
    lm.points[48 + i] = {px(cx + 0.28 * a * std::cos(phi)),
                         px(cy + 0.55 * b + 0.10 * b * std::sin(phi))};
  }
  for (int i = 0; i < 8; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / 8.0;
    lm.points[60 + i] = {px(cx + 0.18 * a * std::cos(phi)),
                         px(cy + 0.55 * b + 0.05 * b * std::sin(phi))};
  }

  // same rule the roi module applies
  fl.forehead.left = static_cast<int>(lm.points[kBrowLeft].x);
  fl.forehead.right = static_cast<int>(lm.points[kBrowRight].x);
  fl.forehead.top = static_cast<int>(lm.face_box.top);
  fl.forehead.bottom =
      static_cast<int>(std::min(lm.points[kBrowLeft].y, lm.points[kBrowRight].y));
  return fl;
}

void write_sidecar(const std::string& path, const LandmarkSet& lm, std::int64_t frames) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  std::string points;
  for (const Point2& p : lm.points) {
    points += "[" + std::to_string(static_cast<long>(p.x)) + "," +
              std::to_string(static_cast<long>(p.y)) + "],";
  }
  points.pop_back();
  const std::string box = std::to_string(static_cast<long>(lm.face_box.left)) + "," +
                          std::to_string(static_cast<long>(lm.face_box.top)) + "," +
                          std::to_string(static_cast<long>(lm.face_box.right)) + "," +
                          std::to_string(static_cast<long>(lm.face_box.bottom));
  for (std::int64_t i = 0; i < frames; ++i) {
    out << "{\"frame\":" << i << ",\"face_box\":[" << box << "],\"points\":[" << points
        << "]}\n";
  }
}

}  // namespace

void SynthSpec::validate() const {
  if (!(hr_hz > 0.8 && hr_hz < 2.2)) {
    throw ConfigError("synth: hr_hz must lie inside (0.8, 2.2)");
  }
  if (!(rr_hz > 0.18 && rr_hz < 0.5)) {
    throw ConfigError("synth: rr_hz must lie inside (0.18, 0.5)");
  }
  const double swing = 1.5 * hue_amp;  // hr component plus half-amplitude rr component
  if (!(base_hsv.h - swing > 0.0 && base_hsv.h + swing < 0.1)) {
    throw ConfigError("synth: hue must stay inside (0, 0.1) under modulation");
  }
  if (fps <= 0 || duration_s <= 0) throw ConfigError("synth: fps and duration must be positive");
  if (width < 16 || height < 16) throw ConfigError("synth: frame too small");
  if (noise_sigma < 0) throw ConfigError("synth: noise_sigma must be >= 0");
  if (brightness_drift) {
    const DriftSpec& d = *brightness_drift;
    if (!(d.gain_min > 0 && d.gain_min <= d.gain_max && d.gain_max <= 1.0)) {
      throw ConfigError("synth: drift gains must satisfy 0 < min <= max <= 1");
    }
    if (d.freq_hz <= 0) throw ConfigError("synth: drift freq must be positive");
  }
}

Y4mWriter::Y4mWriter(const std::string& path, int width, int height, double fps,
                     Subsampling subsampling, YuvRange range)
    : out_(path, std::ios::binary),
      width_(width),
      height_(height),
      subsampling_(subsampling),
      range_(range) {
  if (!out_) throw IoError("cannot write " + path);
  if (subsampling == Subsampling::c420 && (width % 2 != 0 || height % 2 != 0)) {
    throw ConfigError("y4m writer: 4:2:0 needs even dimensions");
  }
  long num = std::lround(fps * 1000.0);
  long den = 1000;
  const long g = std::gcd(num, den);
  num /= g;
  den /= g;
  out_ << "YUV4MPEG2 W" << width << " H" << height << " F" << num << ":" << den
       << " Ip A1:1 " << (subsampling == Subsampling::c444 ? "C444" : "C420")
       << (range_ == YuvRange::full ? " XCOLORRANGE=FULL" : " XCOLORRANGE=LIMITED")
       << "\n";
}

void Y4mWriter::write(const Frame& f) {
  if (f.width != width_ || f.height != height_) {
    throw FrameSizeError("y4m writer: frame " + std::to_string(f.index) + " is " +
                         std::to_string(f.width) + "x" + std::to_string(f.height));
  }
  const std::size_t luma = static_cast<std::size_t>(width_) * height_;
  std::vector<std::uint8_t> y(luma), u(luma), v(luma);
  for (std::size_t i = 0; i < luma; ++i) {
    rgb_to_yuv({f.pixels[i * 3], f.pixels[i * 3 + 1], f.pixels[i * 3 + 2]}, range_,
               y[i], u[i], v[i]);
  }
  out_ << "FRAME\n";
  out_.write(reinterpret_cast<const char*>(y.data()), static_cast<std::streamsize>(luma));
  if (subsampling_ == Subsampling::c444) {
    out_.write(reinterpret_cast<const char*>(u.data()), static_cast<std::streamsize>(luma));
    out_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(luma));
    return;
  }
  const int cw = width_ / 2;
  const int ch = height_ / 2;
  std::vector<std::uint8_t> us(static_cast<std::size_t>(cw) * ch);
  std::vector<std::uint8_t> vs(us.size());
  for (int cy = 0; cy < ch; ++cy) {
    for (int cx = 0; cx < cw; ++cx) {
      int usum = 0, vsum = 0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const std::size_t i =
              static_cast<std::size_t>(cy * 2 + dy) * width_ + (cx * 2 + dx);
          usum += u[i];
          vsum += v[i];
        }
      }
      us[static_cast<std::size_t>(cy) * cw + cx] = static_cast<std::uint8_t>((usum + 2) / 4);
      vs[static_cast<std::size_t>(cy) * cw + cx] = static_cast<std::uint8_t>((vsum + 2) / 4);
    }
  }
  out_.write(reinterpret_cast<const char*>(us.data()), static_cast<std::streamsize>(us.size()));
  out_.write(reinterpret_cast<const char*>(vs.data()), static_cast<std::streamsize>(vs.size()));
}

void write_ppm(const std::string& path, const Frame& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P6\n" << f.width << " " << f.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(f.pixels.data()),
            static_cast<std::streamsize>(f.pixels.size()));
}

GroundTruth generate(const SynthSpec& spec, const std::string& out_dir) {
  spec.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

  const FaceLayout face = make_face_layout(spec.width, spec.height);
  const std::int64_t frame_count = std::llround(spec.fps * spec.duration_s);
  if (frame_count < 1) throw ConfigError("synth: clip would contain no frames");

  // base color in float RGB; the green modulation rides on the value channel
  double base_r, base_g, base_b;
  hsv_to_rgb_f(spec.base_hsv.h, spec.base_hsv.s, spec.base_hsv.v, base_r, base_g, base_b);
  if (base_g < 1.0) throw ConfigError("synth: base color has no green to modulate");
  const double green_rel = spec.green_amp / base_g;
  if (spec.base_hsv.v * (1.0 + 1.5 * green_rel) > 1.0) {
    throw ConfigError("synth: green modulation would clip the value channel");
  }

  // static backdrop: background plus face ellipse
  Frame canvas;
  canvas.width = spec.width;
  canvas.height = spec.height;
  canvas.pixels.assign(static_cast<std::size_t>(spec.width) * spec.height * 3, 0);
  const RgbPixel background{70, 80, 100};
  const RgbPixel skin{quantize(base_r), quantize(base_g), quantize(base_b)};
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const double nx = (x - face.ellipse_cx) / face.ellipse_a;
      const double ny = (y - face.ellipse_cy) / face.ellipse_b;
      canvas.set(x, y, nx * nx + ny * ny <= 1.0 ? skin : background);
    }
  }

  GroundTruth truth;
  truth.hr_bpm = 60.0 * spec.hr_hz;
  truth.rr_bpm = 60.0 * spec.rr_hz;
  truth.forehead_rect = face.forehead;
  truth.mean_hue_trace.reserve(static_cast<std::size_t>(frame_count));

  const fs::path dir(out_dir);
  std::unique_ptr<Y4mWriter> y4m;
  std::string pattern = "frame_%05d.ppm";
  if (spec.container == SynthContainer::ppm_sequence) {
    truth.stream_path = (dir / "meta.json").string();
    std::ofstream meta(truth.stream_path);
    meta << "{\"fps\":" << spec.fps << ",\"width\":" << spec.width
         << ",\"height\":" << spec.height << ",\"pattern\":\"" << pattern
         << "\",\"frames\":" << frame_count << "}\n";
  } else {
    truth.stream_path = (dir / "clip.y4m").string();
    y4m = std::make_unique<Y4mWriter>(
        truth.stream_path, spec.width, spec.height, spec.fps,
        spec.container == SynthContainer::y4m444 ? Y4mWriter::Subsampling::c444
                                                 : Y4mWriter::Subsampling::c420,
        YuvRange::full);
  }

  const double two_pi = 2.0 * std::numbers::pi;
  Frame frame = canvas;
  for (std::int64_t i = 0; i < frame_count; ++i) {
    const double t = i / spec.fps;
    const double hue = spec.base_hsv.h + spec.hue_amp * std::sin(two_pi * spec.hr_hz * t) +
                       0.5 * spec.hue_amp * std::sin(two_pi * spec.rr_hz * t);
    const double green_mod = green_rel * std::sin(two_pi * spec.hr_hz * t) +
                             0.5 * green_rel * std::sin(two_pi * spec.rr_hz * t);
    double gain = 1.0;
    if (spec.brightness_drift) {
      const DriftSpec& d = *spec.brightness_drift;
      gain = 0.5 * (d.gain_min + d.gain_max) +
             0.5 * (d.gain_max - d.gain_min) *
                 std::sin(two_pi * d.freq_hz * t + d.phase_rad);
    }
    const double value = spec.base_hsv.v * (1.0 + green_mod) * gain;
    truth.mean_hue_trace.push_back(hue);

    double fr, fg, fb;
    hsv_to_rgb_f(hue, spec.base_hsv.s, value, fr, fg, fb);

    frame.pixels = canvas.pixels;
    frame.index = i;
    frame.timestamp_s = t;
    if (spec.brightness_drift || spec.noise_sigma > 0.0) {
      // drift scales the whole scene; noise lands on every pixel
      GaussianSource noise(mix_seed(spec.seed, static_cast<std::uint64_t>(i)));
      for (std::size_t p = 0; p < frame.pixels.size(); ++p) {
        double c = canvas.pixels[p] * gain;
        if (spec.noise_sigma > 0.0) c += spec.noise_sigma * noise.next();
        frame.pixels[p] = quantize(c);
      }
      if (spec.noise_sigma > 0.0) {
        // forehead pixels take fresh draws from a separate stream
        GaussianSource fg_noise(mix_seed(spec.seed ^ 0x5deece66dULL,
                                         static_cast<std::uint64_t>(i)));
        for (int y = face.forehead.top; y < face.forehead.bottom; ++y) {
          for (int x = face.forehead.left; x < face.forehead.right; ++x) {
            frame.set(x, y,
                      {quantize(fr + spec.noise_sigma * fg_noise.next()),
                       quantize(fg + spec.noise_sigma * fg_noise.next()),
                       quantize(fb + spec.noise_sigma * fg_noise.next())});
          }
        }
      } else {
        for (int y = face.forehead.top; y < face.forehead.bottom; ++y) {
          for (int x = face.forehead.left; x < face.forehead.right; ++x) {
            frame.set(x, y, {quantize(fr), quantize(fg), quantize(fb)});
          }
        }
      }
    } else {
      for (int y = face.forehead.top; y < face.forehead.bottom; ++y) {
        for (int x = face.forehead.left; x < face.forehead.right; ++x) {
          frame.set(x, y, {quantize(fr), quantize(fg), quantize(fb)});
        }
      }
    }

    if (y4m) {
      y4m->write(frame);
    } else {
      char name[64];
      std::snprintf(name, sizeof(name), pattern.c_str(), static_cast<int>(i));
      write_ppm((dir / name).string(), frame);
    }
  }

  truth.landmarks_path = (dir / "landmarks.jsonl").string();
  write_sidecar(truth.landmarks_path, face.landmarks, frame_count);

  truth.truth_path = (dir / "truth.json").string();
  nlohmann::json j;
  j["hr_bpm"] = truth.hr_bpm;
  j["rr_bpm"] = truth.rr_bpm;
  j["forehead_rect"] = {truth.forehead_rect.left, truth.forehead_rect.top,
                        truth.forehead_rect.right, truth.forehead_rect.bottom};
  j["mean_hue_trace"] = truth.mean_hue_trace;
  std::ofstream tf(truth.truth_path);
  if (!tf) throw IoError("cannot write " + truth.truth_path);
  tf << j.dump() << "\n";

  return truth;
}

}  // namespace vitals
