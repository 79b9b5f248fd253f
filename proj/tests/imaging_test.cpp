#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "roadseg/error.hpp"
#include "roadseg/imaging.hpp"
#include "test_support.hpp"

namespace roadseg {
namespace {

using testing::expect_errc;

std::vector<std::uint8_t> bytes_of(const std::string& header, std::vector<std::uint8_t> payload) {
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

GrayImage random_image(std::mt19937_64& gen, int w, int h) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w * h));
  for (auto& p : px) p = static_cast<std::uint8_t>(gen() & 0xff);
  return GrayImage(w, h, std::move(px));
}

GrayImage transpose(const GrayImage& img) {
  GrayImage out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.set(y, x, img.at(x, y));
  }
  return out;
}

TEST(Pgm, DecodesTwoByTwo) {
  const auto img = load_pgm(bytes_of("P5 2 2 255\n", {0, 128, 255, 64}));
  ASSERT_EQ(img.width(), 2);
  ASSERT_EQ(img.height(), 2);
  EXPECT_EQ(img.at(0, 0), 0);
  EXPECT_EQ(img.at(1, 0), 128);
  EXPECT_EQ(img.at(0, 1), 255);
  EXPECT_EQ(img.at(1, 1), 64);
}

TEST(Pgm, RejectsSixteenBitMaxval) {
  expect_errc(Errc::MaxvalUnsupported,
              [] { load_pgm(bytes_of("P5 2 2 65535\n", {0, 0, 0, 0, 0, 0, 0, 0})); });
}

TEST(Pgm, RejectsShortPayload) {
  expect_errc(Errc::TruncatedPayload,
              [] { load_pgm(bytes_of("P5 3 3 255\n", {1, 2, 3, 4, 5, 6, 7, 8})); });
}

TEST(Pgm, RejectsWrongMagic) {
  expect_errc(Errc::BadMagic, [] { load_pgm(bytes_of("P2 1 1 255\n", {0})); });
  expect_errc(Errc::BadMagic, [] { load_pgm(bytes_of("", {})); });
}

TEST(Pgm, RejectsNonPositiveDimensions) {
  expect_errc(Errc::BadDimensions, [] { load_pgm(bytes_of("P5 0 2 255\n", {})); });
  expect_errc(Errc::BadDimensions, [] { load_pgm(bytes_of("P5 -1 2 255\n", {})); });
}

TEST(Pgm, SkipsHeaderComments) {
  const auto img = load_pgm(bytes_of("P5\n# made by hand\n1 2\n# another\n255\n", {9, 10}));
  EXPECT_EQ(img.width(), 1);
  EXPECT_EQ(img.at(0, 1), 10);
}

TEST(Pgm, SaveUsesCanonicalHeader) {
  const GrayImage img(3, 1, std::vector<std::uint8_t>{1, 2, 3});
  EXPECT_EQ(save_pgm(img), bytes_of("P5\n3 1\n255\n", {1, 2, 3}));
}

TEST(Pgm, RoundTripsBitExactly) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 25; ++trial) {
    const int w = 1 + static_cast<int>(gen() % 40);
    const int h = 1 + static_cast<int>(gen() % 40);
    const GrayImage img = random_image(gen, w, h);
    const auto bytes = save_pgm(img);
    EXPECT_EQ(load_pgm(bytes), img);
    EXPECT_EQ(save_pgm(load_pgm(bytes)), bytes);
  }
}

TEST(Pgm, FileRoundTrip) {
  testing::TempDir dir("pgm");
  std::mt19937_64 gen(5);
  const GrayImage img = random_image(gen, 17, 9);
  write_pgm_file(dir / "a.pgm", img);
  EXPECT_EQ(read_pgm_file(dir / "a.pgm"), img);
  expect_errc(Errc::Io, [&] { read_pgm_file(dir / "missing.pgm"); });
}

TEST(Normalize, Endpoints) {
  EXPECT_EQ(normalize(0), 0.0);
  EXPECT_EQ(normalize(255), 1.0);
  EXPECT_DOUBLE_EQ(normalize(128), 128.0 / 255.0);
  EXPECT_NEAR(normalize(128), 0.50196, 1e-5);
}

TEST(Gradient, ConstantImageIsZero) {
  const auto field = gradient_field(GrayImage(13, 7, 100));
  for (std::size_t i = 0; i < field.magnitudes.size(); ++i) {
    EXPECT_EQ(field.magnitudes[i], 0.0);
    EXPECT_EQ(field.directions[i], 0.0);
  }
}

TEST(Gradient, HorizontalRamp) {
  GrayImage img(10, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 10; ++x) img.set(x, y, static_cast<std::uint8_t>(50 + x));
  }
  const auto field = gradient_field(img);
  for (int y = 0; y < 4; ++y) {
    for (int x = 1; x < 9; ++x) {
      EXPECT_NEAR(field.magnitude(x, y), 1.0 / 255.0, 1e-15);
      EXPECT_NEAR(field.magnitude(x, y), 0.003922, 1e-6);
      EXPECT_EQ(field.direction(x, y), 0.0);
    }
    // Replicated borders halve the step.
    EXPECT_NEAR(field.magnitude(0, y), 0.5 / 255.0, 1e-15);
  }
}

TEST(Gradient, VerticalRamp) {
  GrayImage img(4, 10);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 4; ++x) img.set(x, y, static_cast<std::uint8_t>(20 + y));
  }
  const auto field = gradient_field(img);
  for (int y = 1; y < 9; ++y) {
    EXPECT_NEAR(field.direction(2, y), std::numbers::pi / 2, 1e-15);
  }
}

TEST(Gradient, DecreasingRampPointsToPi) {
  GrayImage img(6, 3);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 6; ++x) img.set(x, y, static_cast<std::uint8_t>(200 - 10 * x));
  }
  const auto field = gradient_field(img);
  EXPECT_EQ(field.direction(2, 1), std::numbers::pi);
}

TEST(Gradient, DirectionsStayInHalfOpenRange) {
  std::mt19937_64 gen(11);
  const auto field = gradient_field(random_image(gen, 31, 23));
  for (std::size_t i = 0; i < field.directions.size(); ++i) {
    EXPECT_GT(field.directions[i], -std::numbers::pi);
    EXPECT_LE(field.directions[i], std::numbers::pi);
    EXPECT_GE(field.magnitudes[i], 0.0);
    if (field.magnitudes[i] == 0.0) EXPECT_EQ(field.directions[i], 0.0);
  }
}

TEST(Gradient, TranspositionSwapsRoles) {
  std::mt19937_64 gen(17);
  const GrayImage img = random_image(gen, 12, 9);
  const auto a = gradient_field(img);
  const auto b = gradient_field(transpose(img));
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      EXPECT_DOUBLE_EQ(a.magnitude(x, y), b.magnitude(y, x));
    }
  }

  // Smooth ramp v = x + 2y: direction maps to pi/2 - theta.
  GrayImage ramp(10, 10);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) ramp.set(x, y, static_cast<std::uint8_t>(x + 2 * y));
  }
  const auto r = gradient_field(ramp);
  const auto rt = gradient_field(transpose(ramp));
  for (int y = 1; y < 9; ++y) {
    for (int x = 1; x < 9; ++x) {
      EXPECT_NEAR(rt.direction(y, x), std::numbers::pi / 2 - r.direction(x, y), 1e-12);
    }
  }
}

TEST(Histogram, SingleValue) {
  const auto hist = intensity_histogram(GrayImage(5, 5, 7), Rect{0, 0, 5, 5});
  for (std::size_t b = 0; b < hist.size(); ++b) EXPECT_EQ(hist[b], b == 7 ? 1.0 : 0.0);
}

TEST(Histogram, TwoValues) {
  const GrayImage img(2, 2, std::vector<std::uint8_t>{0, 0, 255, 255});
  const auto hist = intensity_histogram(img, Rect{0, 0, 2, 2});
  EXPECT_EQ(hist[0], 0.5);
  EXPECT_EQ(hist[255], 0.5);
}

TEST(Histogram, SumsToOneForRandomRois) {
  std::mt19937_64 gen(23);
  const GrayImage img = random_image(gen, 40, 30);
  for (int trial = 0; trial < 50; ++trial) {
    const int w = 1 + static_cast<int>(gen() % 40);
    const int h = 1 + static_cast<int>(gen() % 30);
    const int x = static_cast<int>(gen() % static_cast<std::uint64_t>(41 - w));
    const int y = static_cast<int>(gen() % static_cast<std::uint64_t>(31 - h));
    const auto hist = intensity_histogram(img, Rect{x, y, w, h});
    double total = 0.0;
    for (const double v : hist) {
      EXPECT_GE(v, 0.0);
      total += v;
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(Histogram, RejectsOutOfBounds) {
  expect_errc(Errc::OutOfBounds, [] { intensity_histogram(GrayImage(4, 4), Rect{2, 2, 3, 1}); });
}

TEST(Crop, FullImageIsIdentity) {
  std::mt19937_64 gen(29);
  const GrayImage img = random_image(gen, 8, 6);
  EXPECT_EQ(crop(img, Rect{0, 0, 8, 6}), img);
}

TEST(Crop, SinglePixel) {
  std::mt19937_64 gen(31);
  const GrayImage img = random_image(gen, 8, 6);
  const GrayImage one = crop(img, Rect{3, 4, 1, 1});
  ASSERT_EQ(one.width(), 1);
  ASSERT_EQ(one.height(), 1);
  EXPECT_EQ(one.at(0, 0), img.at(3, 4));
}

TEST(Crop, RejectsOverhang) {
  expect_errc(Errc::OutOfBounds, [] { crop(GrayImage(8, 6), Rect{5, 0, 4, 2}); });
  expect_errc(Errc::OutOfBounds, [] { crop(GrayImage(8, 6), Rect{-1, 0, 2, 2}); });
}

TEST(GrayImage, RejectsBadDimensions) {
  expect_errc(Errc::BadDimensions, [] { GrayImage(0, 3); });
  expect_errc(Errc::BadDimensions, [] { GrayImage(2, 2, std::vector<std::uint8_t>(3)); });
}

}  // namespace
}  // namespace roadseg
