#include "vitals/roi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "vitals/error.hpp"

namespace vitals {

ForeheadRect forehead_from_landmarks(const LandmarkSet& lm, int frame_w, int frame_h) {
  const Point2& p21 = lm.points[kBrowLeft];
  const Point2& p24 = lm.points[kBrowRight];

  ForeheadRect r;
  r.left = static_cast<int>(std::lround(p21.x));
  r.right = static_cast<int>(std::lround(p24.x));
  r.top = static_cast<int>(std::lround(lm.face_box.top));
  r.bottom = static_cast<int>(std::lround(std::min(p21.y, p24.y)));

  r.left = std::clamp(r.left, 0, frame_w);
  r.right = std::clamp(r.right, 0, frame_w);
  r.top = std::clamp(r.top, 0, frame_h);
  r.bottom = std::clamp(r.bottom, 0, frame_h);

  if (r.left >= r.right || r.top >= r.bottom) {
    throw GeometryError("frame " + std::to_string(lm.frame_index) +
                        ": degenerate forehead rect (" + std::to_string(r.left) + "," +
                        std::to_string(r.top) + "," + std::to_string(r.right) + "," +
                        std::to_string(r.bottom) + ")");
  }
  return r;
}

namespace {

void require_inside(const Frame& frame, const ForeheadRect& rect) {
  if (rect.left < 0 || rect.top < 0 || rect.right > frame.width ||
      rect.bottom > frame.height || rect.left >= rect.right || rect.top >= rect.bottom) {
    throw GeometryError("roi rect (" + std::to_string(rect.left) + "," +
                        std::to_string(rect.top) + "," + std::to_string(rect.right) + "," +
                        std::to_string(rect.bottom) + ") outside " +
                        std::to_string(frame.width) + "x" + std::to_string(frame.height) +
                        " frame");
  }
}

}  // namespace

RoiSample mean_hue_masked(const Frame& frame, const ForeheadRect& rect, const HueMask& mask) {
  require_inside(frame, rect);
  double sum = 0.0;
  long count = 0;
  for (int y = rect.top; y < rect.bottom; ++y) {
    for (int x = rect.left; x < rect.right; ++x) {
      const double h = rgb_to_hsv(frame.at(x, y)).h;
      if (mask.passes(h)) {
        sum += h;
        ++count;
      }
    }
  }
  RoiSample s;
  s.timestamp_s = frame.timestamp_s;
  s.channel = Channel::hue;
  s.pixel_count = count;
  s.value = count > 0 ? sum / count : 0.0;
  return s;
}

RoiSample mean_green(const Frame& frame, const ForeheadRect& rect) {
  require_inside(frame, rect);
  double sum = 0.0;
  for (int y = rect.top; y < rect.bottom; ++y) {
    for (int x = rect.left; x < rect.right; ++x) {
      sum += frame.at(x, y).g;
    }
  }
  RoiSample s;
  s.timestamp_s = frame.timestamp_s;
  s.channel = Channel::green;
  s.pixel_count = rect.area();
  s.value = s.pixel_count > 0 ? sum / s.pixel_count : 0.0;
  return s;
}

std::vector<LandmarkSet> parse_landmark_sidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::vector<LandmarkSet> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    try {
      LandmarkSet lm;
      lm.frame_index = j.at("frame").get<std::int64_t>();
      const auto& box = j.at("face_box");
      if (!box.is_array() || box.size() != 4) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": face_box needs 4 numbers");
      }
      lm.face_box = {box[0].get<double>(), box[1].get<double>(),
                     box[2].get<double>(), box[3].get<double>()};
      const auto& pts = j.at("points");
      if (!pts.is_array() || pts.size() != 68) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": expected 68 points, got " +
                         std::to_string(pts.size()));
      }
      for (std::size_t i = 0; i < 68; ++i) {
        lm.points[i] = {pts[i].at(0).get<double>(), pts[i].at(1).get<double>()};
      }
      if (lm.face_box.right - lm.face_box.left <= 0 ||
          lm.face_box.bottom - lm.face_box.top <= 0) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": face_box has no area");
      }
      out.push_back(lm);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace vitals
