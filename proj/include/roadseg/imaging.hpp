#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace roadseg {

/// Axis-aligned pixel box covering columns [x, x+w) and rows [y, y+h).
struct Rect {
  int x = 0;
  int y = 0;
  int w = 1;
  int h = 1;

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// 8-bit gray-scale raster, row-major with the origin at the top-left.
class GrayImage {
 public:
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> samples);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  std::uint8_t at(int x, int y) const noexcept {
    return samples_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                    static_cast<std::size_t>(x)];
  }
  void set(int x, int y, std::uint8_t value) noexcept {
    samples_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
             static_cast<std::size_t>(x)] = value;
  }

  std::span<const std::uint8_t> samples() const noexcept { return samples_; }

  /// True when `roi` lies entirely inside the raster.
  bool contains(const Rect& roi) const noexcept;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> samples_;
};

/// Per-pixel gradient of normalized brightness.
struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<double> magnitudes;
  std::vector<double> directions;  // radians in (-pi, pi]

  double magnitude(int x, int y) const noexcept {
    return magnitudes[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(x)];
  }
  double direction(int x, int y) const noexcept {
    return directions[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(x)];
  }
};

using Histogram = std::array<double, 256>;

/// Decodes a binary PGM ("P5", maxval 255). Header comments are allowed.
GrayImage load_pgm(std::span<const std::uint8_t> bytes);

/// Encodes as "P5\n<w> <h>\n255\n" followed by the raw samples.
std::vector<std::uint8_t> save_pgm(const GrayImage& img);

GrayImage read_pgm_file(const std::filesystem::path& path);
void write_pgm_file(const std::filesystem::path& path, const GrayImage& img);

constexpr double normalize(std::uint8_t sample) noexcept { return sample / 255.0; }

/// Central differences on normalized brightness with replicated borders.
GradientField gradient_field(const GrayImage& img);

/// Frequency of each raw value inside `roi`; bins sum to one.
Histogram intensity_histogram(const GrayImage& img, const Rect& roi);

GrayImage crop(const GrayImage& img, const Rect& roi);

}  // namespace roadseg
