#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "vitals/color.hpp"
#include "vitals/error.hpp"

using namespace vitals;

TEST_CASE("rgb_to_hsv on anchor colors") {
  SUBCASE("pure red sits at the hue origin") {
    const HsvPixel p = rgb_to_hsv({255, 0, 0});
    CHECK(p.h == doctest::Approx(0.0));
    CHECK(p.s == doctest::Approx(1.0));
    CHECK(p.v == doctest::Approx(1.0));
  }
  SUBCASE("achromatic gray forces s = 0 and canonical h = 0") {
    const HsvPixel p = rgb_to_hsv({128, 128, 128});
    CHECK(p.h == 0.0);
    CHECK(p.s == 0.0);
    CHECK(p.v == doctest::Approx(128.0 / 255.0));
  }
  SUBCASE("skin-like tone lands inside the (0, 0.1) mask") {
    // hexcone by hand: delta = 70, (g-b)/delta = 20/70, h = (20/70)/6
    const HsvPixel p = rgb_to_hsv({230, 180, 160});
    CHECK(p.h == doctest::Approx(0.0476190476).epsilon(1e-9));
    CHECK(p.h > 0.0);
    CHECK(p.h < 0.1);
    CHECK(p.s == doctest::Approx(70.0 / 230.0).epsilon(1e-9));
    CHECK(p.v == doctest::Approx(230.0 / 255.0).epsilon(1e-9));
  }
}

TEST_CASE("hsv round-trips exactly for every 8-bit RGB triple") {
  // exhaustive: the independent inverse and the library inverse must both
  // reproduce the input, and h/s/v must stay inside their ranges
  long failures = 0;
  for (int r = 0; r < 256; ++r) {
    for (int g = 0; g < 256; ++g) {
      for (int b = 0; b < 256; ++b) {
        const RgbPixel p{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                         static_cast<std::uint8_t>(b)};
        const HsvPixel h = rgb_to_hsv(p);
        if (!(h.h >= 0.0 && h.h < 1.0 && h.s >= 0.0 && h.s <= 1.0 && h.v >= 0.0 &&
              h.v <= 1.0)) {
          ++failures;
          continue;
        }
        int orr, org, orb;
        oracle::hsv_to_rgb(h.h, h.s, h.v, orr, org, orb);
        const RgbPixel lib = hsv_to_rgb(h);
        if (orr != r || org != g || orb != b || lib.r != r || lib.g != g || lib.b != b) {
          ++failures;
        }
      }
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("hue survives brightness scaling of saturated pixels") {
  // saturated draws keep the scaled chroma high enough that 8-bit rounding
  // cannot move the hue by the 0.01 bound
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> hue(0.0, 1.0);
  std::uniform_real_distribution<double> sat(0.8, 1.0);
  std::uniform_real_distribution<double> val(0.5, 1.0);
  std::uniform_real_distribution<double> scale(0.35, 1.0);
  for (int i = 0; i < 20000; ++i) {
    int r, g, b;
    oracle::hsv_to_rgb(hue(rng), sat(rng), val(rng), r, g, b);
    const RgbPixel p{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                     static_cast<std::uint8_t>(b)};
    const double k = scale(rng);
    const RgbPixel scaled{static_cast<std::uint8_t>(std::lround(k * p.r)),
                          static_cast<std::uint8_t>(std::lround(k * p.g)),
                          static_cast<std::uint8_t>(std::lround(k * p.b))};
    if (std::max({scaled.r, scaled.g, scaled.b}) < 32) continue;
    CHECK(hue_distance(rgb_to_hsv(p).h, rgb_to_hsv(scaled).h) < 0.01);
  }
}

TEST_CASE("yuv conversion anchors") {
  SUBCASE("limited-range black and white points") {
    const RgbPixel black = yuv_to_rgb(16, 128, 128, YuvRange::limited);
    CHECK(black.r == 0);
    CHECK(black.g == 0);
    CHECK(black.b == 0);
    const RgbPixel white = yuv_to_rgb(235, 128, 128, YuvRange::limited);
    CHECK(white.r == 255);
    CHECK(white.g == 255);
    CHECK(white.b == 255);
  }
  SUBCASE("full-range zero-chroma gray passes through") {
    const RgbPixel gray = yuv_to_rgb(128, 128, 128, YuvRange::full);
    CHECK(gray.r == 128);
    CHECK(gray.g == 128);
    CHECK(gray.b == 128);
  }
}

TEST_CASE("yuv420_to_rgb validates plane dimensions") {
  std::vector<std::uint8_t> y(9, 128), u(4, 128), v(4, 128), rgb(27);
  CHECK_THROWS_AS(yuv420_to_rgb(y.data(), u.data(), v.data(), 3, 3, YuvRange::full, rgb.data()),
                  FormatError);
}

TEST_CASE("yuv420_to_rgb upsamples chroma nearest-neighbour") {
  // 2x2 frame, single chroma sample shared by all four pixels
  const std::vector<std::uint8_t> y{100, 100, 100, 100};
  const std::vector<std::uint8_t> u{90}, v{160};
  std::vector<std::uint8_t> rgb(12);
  yuv420_to_rgb(y.data(), u.data(), v.data(), 2, 2, YuvRange::full, rgb.data());
  const RgbPixel expect = yuv_to_rgb(100, 90, 160, YuvRange::full);
  for (int i = 0; i < 4; ++i) {
    CHECK(rgb[i * 3 + 0] == expect.r);
    CHECK(rgb[i * 3 + 1] == expect.g);
    CHECK(rgb[i * 3 + 2] == expect.b);
  }
}
