#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "roadseg/imaging.hpp"

namespace roadseg {

/// ROI descriptor laid out as
///   [normalized pixels (w*h)] [histogram (256)] [gradient magnitudes (w*h)] [gradient directions (w*h)]
/// with every block row-major.
struct FeatureVector {
  std::vector<double> values;
  int roi_w = 0;
  int roi_h = 0;

  std::size_t size() const noexcept { return values.size(); }
  std::span<const double> view() const noexcept { return values; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

constexpr std::size_t kHistogramBins = 256;

constexpr std::size_t feature_dimension(int roi_w, int roi_h) noexcept {
  return 3 * static_cast<std::size_t>(roi_w) * static_cast<std::size_t>(roi_h) + kHistogramBins;
}

/// `grad` must be the field of the whole `img`; ROI-border gradients see true neighbours.
FeatureVector extract_features(const GrayImage& img, const GradientField& grad, const Rect& roi);

/// Allocation-free variant; `out` must hold exactly feature_dimension(roi.w, roi.h) values.
void extract_features_into(const GrayImage& img, const GradientField& grad, const Rect& roi,
                           std::span<double> out);

}  // namespace roadseg
