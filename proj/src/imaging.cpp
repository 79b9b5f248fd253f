#include "roadseg/imaging.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>

#include "roadseg/error.hpp"

namespace roadseg {

namespace {

void check_dimensions(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(Errc::BadDimensions, "image dimensions must be positive, got " +
                                         std::to_string(width) + "x" + std::to_string(height));
  }
}

void check_roi(const GrayImage& img, const Rect& roi) {
  if (!img.contains(roi)) {
    throw Error(Errc::OutOfBounds, "rect (" + std::to_string(roi.x) + "," + std::to_string(roi.y) +
                                       "," + std::to_string(roi.w) + "," + std::to_string(roi.h) +
                                       ") not inside " + std::to_string(img.width()) + "x" +
                                       std::to_string(img.height()) + " image");
  }
}

// Minimal cursor over the PGM header: whitespace-separated ASCII tokens with '#' comments.
class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  long long read_int(const char* what) {
    skip_space_and_comments();
    long long value = 0;
    std::size_t digits = 0;
    bool negative = false;
    if (pos_ < bytes_.size() && bytes_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_]) != 0) {
      if (value < 1'000'000'000LL) value = value * 10 + (bytes_[pos_] - '0');
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw Error(Errc::BadDimensions, std::string("missing PGM ") + what);
    return negative ? -value : value;
  }

  // Exactly one whitespace byte separates maxval from the payload.
  void consume_single_whitespace() {
    if (pos_ >= bytes_.size() || std::isspace(bytes_[pos_]) == 0) {
      throw Error(Errc::TruncatedPayload, "missing whitespace after PGM maxval");
    }
    ++pos_;
  }

  std::size_t position() const noexcept { return pos_; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_]) != 0) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dimensions(width, height);
  samples_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  check_dimensions(width, height);
  if (samples_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(Errc::BadDimensions, "sample count " + std::to_string(samples_.size()) +
                                         " does not match " + std::to_string(width) + "x" +
                                         std::to_string(height));
  }
}

bool GrayImage::contains(const Rect& roi) const noexcept {
  return roi.w >= 1 && roi.h >= 1 && roi.x >= 0 && roi.y >= 0 && roi.x <= width_ - roi.w &&
         roi.y <= height_ - roi.h;
}

GrayImage load_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw Error(Errc::BadMagic, "expected binary PGM magic \"P5\"");
  }
  HeaderReader header(bytes);
  const long long width = header.read_int("width");
  const long long height = header.read_int("height");
  const long long maxval = header.read_int("maxval");
  if (width < 1 || height < 1 || width > 1'000'000 || height > 1'000'000) {
    throw Error(Errc::BadDimensions, "non-positive or oversized PGM dimensions");
  }
  if (maxval != 255) {
    throw Error(Errc::MaxvalUnsupported, "maxval " + std::to_string(maxval) + " (only 255 supported)");
  }
  header.consume_single_whitespace();

  const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t start = header.position();
  if (bytes.size() - start < count) {
    throw Error(Errc::TruncatedPayload, "payload has " + std::to_string(bytes.size() - start) +
                                            " bytes, expected " + std::to_string(count));
  }
  std::vector<std::uint8_t> samples(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                                    bytes.begin() + static_cast<std::ptrdiff_t>(start + count));
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(samples));
}

std::vector<std::uint8_t> save_pgm(const GrayImage& img) {
  const std::string header =
      "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.samples().begin(), img.samples().end());
  return out;
}

GrayImage read_pgm_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return load_pgm(bytes);
}

void write_pgm_file(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot create " + path.string());
  const auto bytes = save_pgm(img);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

GradientField gradient_field(const GrayImage& img) {
  const int w = img.width();
  const int h = img.height();
  GradientField field;
  field.width = w;
  field.height = h;
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  field.magnitudes.resize(n);
  field.directions.resize(n);

  for (int y = 0; y < h; ++y) {
    const int up = y > 0 ? y - 1 : 0;
    const int down = y + 1 < h ? y + 1 : h - 1;
    for (int x = 0; x < w; ++x) {
      const int left = x > 0 ? x - 1 : 0;
      const int right = x + 1 < w ? x + 1 : w - 1;
      const double dx = (normalize(img.at(right, y)) - normalize(img.at(left, y))) / 2.0;
      const double dy = (normalize(img.at(x, down)) - normalize(img.at(x, up))) / 2.0;
      const double magnitude = std::sqrt(dx * dx + dy * dy);
      double direction = 0.0;
      if (magnitude > 0.0) {
        direction = std::atan2(dy, dx);
        // atan2(-0.0, negative) yields -pi; the range is half-open at -pi.
        if (direction <= -std::numbers::pi) direction = std::numbers::pi;
      }
      const auto i = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                     static_cast<std::size_t>(x);
      field.magnitudes[i] = magnitude;
      field.directions[i] = direction;
    }
  }
  return field;
}

Histogram intensity_histogram(const GrayImage& img, const Rect& roi) {
  check_roi(img, roi);
  std::array<std::size_t, 256> counts{};
  for (int y = roi.y; y < roi.y + roi.h; ++y) {
    for (int x = roi.x; x < roi.x + roi.w; ++x) ++counts[img.at(x, y)];
  }
  const double total = static_cast<double>(roi.w) * static_cast<double>(roi.h);
  Histogram bins{};
  for (std::size_t b = 0; b < bins.size(); ++b) bins[b] = static_cast<double>(counts[b]) / total;
  return bins;
}

GrayImage crop(const GrayImage& img, const Rect& roi) {
  check_roi(img, roi);
  std::vector<std::uint8_t> samples;
  samples.reserve(static_cast<std::size_t>(roi.w) * static_cast<std::size_t>(roi.h));
  for (int y = roi.y; y < roi.y + roi.h; ++y) {
    for (int x = roi.x; x < roi.x + roi.w; ++x) samples.push_back(img.at(x, y));
  }
  return GrayImage(roi.w, roi.h, std::move(samples));
}

}  // namespace roadseg
