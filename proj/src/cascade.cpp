#include "roadseg/cascade.hpp"

#include <algorithm>
#include <string>

#include "roadseg/error.hpp"
#include "roadseg/features.hpp"
#include "roadseg/random.hpp"
#include "roadseg/sampler.hpp"

namespace roadseg {

namespace {

constexpr std::uint64_t kMiningStream = 0x6d696e696e67ULL;  // "mining"

struct MinedWindow {
  std::size_t frame = 0;
  Rect roi;
  Provenance provenance = Provenance::OffRoad;
};

void count_into(PoolComposition& pool, Provenance p) {
  switch (p) {
    case Provenance::PureRoad: ++pool.pure_road; break;
    case Provenance::OffRoad: ++pool.off_road; break;
    case Provenance::MixedBoundary: ++pool.mixed_boundary; break;
    case Provenance::CarOverlap: ++pool.car_overlap; break;
  }
}

// Negative sliding windows of every frame that the current cascade still accepts.
std::vector<MinedWindow> mine_false_positives(std::span<const AnnotatedFrame> frames,
                                              std::span<const std::size_t> usable,
                                              const CascadeModel& model, int stride) {
  std::vector<MinedWindow> found;
  std::vector<double> buffer(model.dimension());
  for (const std::size_t fi : usable) {
    const AnnotatedFrame& frame = frames[fi];
    const GradientField grad = gradient_field(frame.image);
    for (const Rect& roi : sliding_windows(frame.image.width(), frame.image.height(),
                                           model.roi_w, stride)) {
      const RoiLabel label = label_roi(roi, frame.annotation);
      if (label.label == Label::Positive) continue;
      extract_features_into(frame.image, grad, roi, buffer);
      if (cascade_accepts(model, buffer)) found.push_back({fi, roi, label.provenance});
    }
  }
  return found;
}

}  // namespace

void validate(const CascadeConfig& config) {
  if (config.roi_size < 1) throw Error(Errc::InvalidConfig, "roi_size must be at least 1");
  if (config.samples_per_class_per_frame < 1) {
    throw Error(Errc::InvalidConfig, "samples_per_class_per_frame must be at least 1");
  }
  if (!(config.target_cascade_fpr > 0.0 && config.target_cascade_fpr <= 1.0)) {
    throw Error(Errc::InvalidConfig, "target_cascade_fpr must lie in (0, 1]");
  }
  if (config.max_stages < 1) throw Error(Errc::InvalidConfig, "max_stages must be at least 1");
  if (config.mining_stride < 1) throw Error(Errc::InvalidConfig, "mining_stride must be at least 1");
  validate(config.stage);
}

void validate(const CascadeModel& model) {
  if (model.roi_w < 1 || model.roi_h < 1) throw Error(Errc::ModelFormat, "invalid ROI size");
  if (model.stages.empty()) throw Error(Errc::ModelFormat, "cascade has no stages");
  if (model.rates.size() != model.stages.size()) {
    throw Error(Errc::ModelFormat, "stage and rate counts differ");
  }
  for (std::size_t i = 0; i < model.stages.size(); ++i) {
    const StageModel& stage = model.stages[i];
    const std::string where = "stage " + std::to_string(i);
    if (stage.trees.empty() || stage.trees.size() != stage.alphas.size()) {
      throw Error(Errc::ModelFormat, where + ": tree/alpha counts invalid");
    }
    if (stage.dimension != model.dimension()) {
      throw Error(Errc::DimensionMismatch,
                  where + ": dimension " + std::to_string(stage.dimension) + " != " +
                      std::to_string(model.dimension()) + " implied by the ROI size");
    }
    for (const auto& tree : stage.trees) {
      if (tree.max_feature() >= static_cast<int>(stage.dimension)) {
        throw Error(Errc::ModelFormat, where + ": tree references feature beyond dimension");
      }
    }
    for (const double alpha : stage.alphas) {
      if (!(alpha > 0.0)) throw Error(Errc::ModelFormat, where + ": non-positive vote weight");
    }
    const StageRates& r = model.rates[i];
    if (!(r.detection_rate >= 0.0 && r.detection_rate <= 1.0 && r.false_positive_rate >= 0.0 &&
          r.false_positive_rate <= 1.0)) {
      throw Error(Errc::ModelFormat, where + ": rates outside [0, 1]");
    }
  }
}

std::pair<double, double> cascade_rates(std::span<const double> detection_rates,
                                        std::span<const double> false_positive_rates) {
  if (detection_rates.size() != false_positive_rates.size()) {
    throw Error(Errc::LengthMismatch, "rate lists differ in length");
  }
  double dr = 1.0;
  double fpr = 1.0;
  for (std::size_t i = 0; i < detection_rates.size(); ++i) {
    dr *= detection_rates[i];
    fpr *= false_positive_rates[i];
  }
  return {dr, fpr};
}

CascadeDecision evaluate_cascade(const CascadeModel& model, std::span<const double> x) {
  CascadeDecision decision;
  for (const auto& stage : model.stages) {
    ++decision.stages_evaluated;
    if (!stage_accepts(stage, x)) return decision;
  }
  decision.accepted = !model.stages.empty();
  return decision;
}

bool cascade_accepts(const CascadeModel& model, std::span<const double> x) {
  return evaluate_cascade(model, x).accepted;
}

std::string_view cascade_stop_name(CascadeStop stop) noexcept {
  switch (stop) {
    case CascadeStop::TargetFpr: return "target_fpr";
    case CascadeStop::MaxStages: return "max_stages";
    case CascadeStop::MiningExhausted: return "mining_exhausted";
    case CascadeStop::WeakLearner: return "weak_learner";
    case CascadeStop::PositivesExhausted: return "positives_exhausted";
  }
  return "max_stages";
}

CascadeTrainingResult train_cascade(std::span<const AnnotatedFrame> frames,
                                    const CascadeConfig& config, const PoolObserver& observer) {
  validate(config);
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].annotation.road() != nullptr) usable.push_back(i);
  }
  if (usable.empty()) throw Error(Errc::NoRoadPolygon, "no training frame has a road polygon");

  // (a) random initial pools
  std::vector<LabeledSample> pool;
  for (const std::size_t fi : usable) {
    const AnnotatedFrame& frame = frames[fi];
    Rng rng(derive_seed(config.seed, frame.annotation.frame_id));
    auto drawn = sample_random_rois(frame.annotation, frame.image,
                                    config.samples_per_class_per_frame, config.roi_size, rng, fi);
    std::move(drawn.begin(), drawn.end(), std::back_inserter(pool));
  }
  const auto negative_quota = static_cast<std::size_t>(std::count_if(
      pool.begin(), pool.end(), [](const LabeledSample& s) { return s.label == Label::Negative; }));
  if (negative_quota == 0) throw Error(Errc::NegativePoolEmpty, "no negative samples at stage 1");

  CascadeTrainingResult result;
  CascadeModel& model = result.model;
  model.roi_w = config.roi_size;
  model.roi_h = config.roi_size;
  model.config = config;
  std::size_t mined_last = 0;

  for (int stage_index = 0;; ++stage_index) {
    const auto s = static_cast<std::size_t>(stage_index);
    if (observer) observer(s, pool, model);

    // (b) one boosted stage on the current pools
    StageReport report;
    report.mined_negatives = mined_last;
    for (const auto& sample : pool) {
      if (sample.label == Label::Positive) {
        ++report.positives;
      } else {
        ++report.negatives;
        count_into(report.negative_pool, sample.provenance);
      }
    }

    StageTrainingResult trained;
    try {
      trained = train_stage(pool, config.stage);
    } catch (const Error& e) {
      if (e.code() == Errc::NoWeakLearner && stage_index > 0) {
        result.stop = CascadeStop::WeakLearner;
        break;
      }
      throw Error(e.code(), "stage " + std::to_string(stage_index + 1) + ": " + e.what());
    }
    if (trained.zero_threshold_error > trained.error_bound + 1e-12) {
      throw Error(Errc::BoundViolated,
                  "stage " + std::to_string(stage_index + 1) + ": training error " +
                      std::to_string(trained.zero_threshold_error) + " exceeds AdaBoost bound " +
                      std::to_string(trained.error_bound));
    }
    report.trees = trained.model.trees.size();
    report.stop = trained.stop;
    report.detection_rate = trained.detection_rate;
    report.false_positive_rate = trained.false_positive_rate;
    report.zero_threshold_error = trained.zero_threshold_error;
    report.error_bound = trained.error_bound;
    result.stages.push_back(report);

    const StageModel& stage = model.stages.emplace_back(std::move(trained.model));
    model.rates.push_back({report.detection_rate, report.false_positive_rate});
    result.detection_rate *= report.detection_rate;
    result.false_positive_rate *= report.false_positive_rate;

    // (d) stop conditions
    if (result.false_positive_rate <= config.target_cascade_fpr) {
      result.stop = CascadeStop::TargetFpr;
      break;
    }
    if (stage_index + 1 >= config.max_stages) {
      result.stop = CascadeStop::MaxStages;
      break;
    }

    // (c) keep only what the new stage accepts, refill negatives from false positives
    std::erase_if(pool, [&](const LabeledSample& sample) {
      return !stage_accepts(stage, sample.features.values);
    });
    const auto surviving_negatives = static_cast<std::size_t>(std::count_if(
        pool.begin(), pool.end(), [](const LabeledSample& x) { return x.label == Label::Negative; }));
    if (surviving_negatives == pool.size()) {
      result.stop = CascadeStop::PositivesExhausted;
      break;
    }

    auto mined = mine_false_positives(frames, usable, model, config.mining_stride);
    if (mined.empty()) {
      result.stop = CascadeStop::MiningExhausted;
      break;
    }
    const std::size_t need =
        negative_quota > surviving_negatives ? negative_quota - surviving_negatives : 0;
    Rng rng(derive_seed(config.seed, kMiningStream + s));
    rng.shuffle(std::span(mined));
    mined.resize(std::min(need, mined.size()));
    std::sort(mined.begin(), mined.end(), [](const MinedWindow& a, const MinedWindow& b) {
      return a.frame != b.frame ? a.frame < b.frame
                                : (a.roi.y != b.roi.y ? a.roi.y < b.roi.y : a.roi.x < b.roi.x);
    });

    std::size_t current_frame = frames.size();
    GradientField grad;
    for (const MinedWindow& window : mined) {
      if (window.frame != current_frame) {
        current_frame = window.frame;
        grad = gradient_field(frames[current_frame].image);
      }
      pool.push_back({extract_features(frames[current_frame].image, grad, window.roi),
                      Label::Negative, window.provenance, {window.frame, window.roi}});
    }
    mined_last = mined.size();
  }
  return result;
}

}  // namespace roadseg
