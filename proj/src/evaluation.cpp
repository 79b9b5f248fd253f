#include "roadseg/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "roadseg/error.hpp"
#include "roadseg/features.hpp"
#include "roadseg/sampler.hpp"

namespace roadseg {

namespace {

double ratio(std::size_t num, std::size_t den) noexcept {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void require_samples(std::span<const LabeledSample> samples) {
  if (samples.empty()) throw Error(Errc::EmptySamples, "no evaluation samples");
}

std::string format_fixed(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 6);
  return std::string(buf.data(), res.ptr);
}

}  // namespace

double ConfusionCounts::detection_rate() const noexcept { return ratio(tp, tp + fn); }
double ConfusionCounts::false_positive_rate() const noexcept { return ratio(fp, fp + tn); }

ConfusionCounts confusion(const CascadeModel& model, std::span<const LabeledSample> samples) {
  require_samples(samples);
  ConfusionCounts counts;
  for (const auto& s : samples) {
    const bool accepted = cascade_accepts(model, s.features.values);
    if (s.label == Label::Positive) {
      ++(accepted ? counts.tp : counts.fn);
    } else {
      ++(accepted ? counts.fp : counts.tn);
    }
  }
  return counts;
}

RocCurve roc_sweep(const CascadeModel& model, std::span<const LabeledSample> samples) {
  require_samples(samples);
  if (model.stages.empty()) throw Error(Errc::InvalidArgument, "model has no stages");

  const std::span<const StageModel> prefix(model.stages.data(), model.stages.size() - 1);
  const StageModel& last = model.stages.back();

  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::vector<std::pair<double, Label>> survivors;
  for (const auto& s : samples) {
    (s.label == Label::Positive ? positives : negatives) += 1;
    const bool passes = std::all_of(prefix.begin(), prefix.end(), [&](const StageModel& stage) {
      return stage_accepts(stage, s.features.values);
    });
    if (passes) survivors.emplace_back(stage_score(last, s.features.values), s.label);
  }
  std::sort(survivors.begin(), survivors.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t k = 0; k < survivors.size();) {
    const double threshold = survivors[k].first;
    for (; k < survivors.size() && survivors[k].first == threshold; ++k) {
      (survivors[k].second == Label::Positive ? tp : fp) += 1;
    }
    curve.points.push_back({threshold, ratio(fp, negatives), ratio(tp, positives)});
  }
  curve.points.push_back({-std::numeric_limits<double>::infinity(), ratio(fp, negatives),
                          ratio(tp, positives)});
  return curve;
}

std::optional<RocPoint> best_operating_point(const RocCurve& curve, double max_fpr) {
  std::optional<RocPoint> best;
  for (const auto& p : curve.points) {
    if (p.fpr > max_fpr) continue;
    if (!best || p.dr > best->dr || (p.dr == best->dr && p.fpr < best->fpr)) best = p;
  }
  return best;
}

std::string roc_to_csv(const RocCurve& curve) {
  std::string out = "threshold,fpr,dr\n";
  for (const auto& p : curve.points) {
    out += format_fixed(p.threshold) + "," + format_fixed(p.fpr) + "," + format_fixed(p.dr) + "\n";
  }
  return out;
}

std::vector<StageRates> conditional_stage_rates(const CascadeModel& model,
                                                std::span<const LabeledSample> samples) {
  std::vector<const LabeledSample*> alive;
  alive.reserve(samples.size());
  for (const auto& s : samples) alive.push_back(&s);

  std::vector<StageRates> rates;
  for (const auto& stage : model.stages) {
    std::size_t pos_in = 0;
    std::size_t neg_in = 0;
    std::size_t pos_out = 0;
    std::size_t neg_out = 0;
    std::vector<const LabeledSample*> next;
    for (const LabeledSample* s : alive) {
      const bool positive = s->label == Label::Positive;
      (positive ? pos_in : neg_in) += 1;
      if (stage_accepts(stage, s->features.values)) {
        (positive ? pos_out : neg_out) += 1;
        next.push_back(s);
      }
    }
    rates.push_back({pos_in == 0 ? 1.0 : ratio(pos_out, pos_in),
                     neg_in == 0 ? 1.0 : ratio(neg_out, neg_in)});
    alive = std::move(next);
  }
  return rates;
}

GrayImage render_mask(const CascadeModel& model, const GrayImage& img, int stride) {
  if (img.width() < model.roi_w || img.height() < model.roi_h) {
    throw Error(Errc::ImageTooSmall, "image smaller than the model ROI");
  }
  if (model.roi_w != model.roi_h) throw Error(Errc::InvalidArgument, "mask rendering needs square ROIs");
  GrayImage mask(img.width(), img.height(), 255);
  const GradientField grad = gradient_field(img);
  std::vector<double> buffer(model.dimension());
  for (const Rect& roi : sliding_windows(img.width(), img.height(), model.roi_w, stride)) {
    extract_features_into(img, grad, roi, buffer);
    if (!cascade_accepts(model, buffer)) continue;
    for (int y = roi.y; y < roi.y + roi.h; ++y) {
      for (int x = roi.x; x < roi.x + roi.w; ++x) mask.set(x, y, 0);
    }
  }
  return mask;
}

}  // namespace roadseg
