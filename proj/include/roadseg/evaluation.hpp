#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roadseg/cascade.hpp"

namespace roadseg {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t positives() const noexcept { return tp + fn; }
  std::size_t negatives() const noexcept { return fp + tn; }
  /// tp / (tp + fn); 0 when there are no positives.
  double detection_rate() const noexcept;
  /// fp / (fp + tn); 0 when there are no negatives.
  double false_positive_rate() const noexcept;

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(const CascadeModel& model, std::span<const LabeledSample> samples);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double dr = 0.0;

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  std::vector<RocPoint> points;  // threshold descending, +inf first and -inf last
};

/// Sweeps the last stage's threshold with the earlier stages fixed.
RocCurve roc_sweep(const CascadeModel& model, std::span<const LabeledSample> samples);

/// Highest-DR point with fpr <= max_fpr (ties prefer lower fpr).
std::optional<RocPoint> best_operating_point(const RocCurve& curve, double max_fpr);

/// CSV with header `threshold,fpr,dr` and six decimals per value.
std::string roc_to_csv(const RocCurve& curve);

/// Rates of each stage measured on the samples that survived the stages before it.
/// An empty surviving set has rate 1.
std::vector<StageRates> conditional_stage_rates(const CascadeModel& model,
                                                std::span<const LabeledSample> samples);

/// White image with every cascade-accepted sliding window painted black.
GrayImage render_mask(const CascadeModel& model, const GrayImage& img, int stride);

}  // namespace roadseg
