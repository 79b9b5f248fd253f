#include "roadseg/features.hpp"

#include <algorithm>
#include <string>

#include "roadseg/error.hpp"

namespace roadseg {

void extract_features_into(const GrayImage& img, const GradientField& grad, const Rect& roi,
                           std::span<double> out) {
  if (grad.width != img.width() || grad.height != img.height()) {
    throw Error(Errc::DimensionMismatch, "gradient field does not match image dimensions");
  }
  if (!img.contains(roi)) throw Error(Errc::OutOfBounds, "ROI not inside image");
  const std::size_t area = static_cast<std::size_t>(roi.w) * static_cast<std::size_t>(roi.h);
  if (out.size() != feature_dimension(roi.w, roi.h)) {
    throw Error(Errc::DimensionMismatch, "output span has " + std::to_string(out.size()) +
                                             " slots, need " +
                                             std::to_string(feature_dimension(roi.w, roi.h)));
  }

  auto pixels = out.subspan(0, area);
  auto histogram = out.subspan(area, kHistogramBins);
  auto magnitudes = out.subspan(area + kHistogramBins, area);
  auto directions = out.subspan(2 * area + kHistogramBins, area);

  std::array<std::size_t, kHistogramBins> counts{};
  std::size_t k = 0;
  for (int y = roi.y; y < roi.y + roi.h; ++y) {
    for (int x = roi.x; x < roi.x + roi.w; ++x, ++k) {
      const std::uint8_t v = img.at(x, y);
      ++counts[v];
      pixels[k] = normalize(v);
      magnitudes[k] = grad.magnitude(x, y);
      directions[k] = grad.direction(x, y);
    }
  }
  const auto total = static_cast<double>(area);
  for (std::size_t b = 0; b < kHistogramBins; ++b) {
    histogram[b] = static_cast<double>(counts[b]) / total;
  }
}

FeatureVector extract_features(const GrayImage& img, const GradientField& grad, const Rect& roi) {
  if (roi.w < 1 || roi.h < 1) throw Error(Errc::OutOfBounds, "ROI must be at least 1x1");
  FeatureVector fv;
  fv.roi_w = roi.w;
  fv.roi_h = roi.h;
  fv.values.resize(feature_dimension(roi.w, roi.h));
  extract_features_into(img, grad, roi, fv.values);
  return fv;
}

}  // namespace roadseg
