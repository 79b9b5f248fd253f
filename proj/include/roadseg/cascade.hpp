#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "roadseg/boosting.hpp"
#include "roadseg/dataset.hpp"

namespace roadseg {

struct CascadeConfig {
  int roi_size = 15;
  int samples_per_class_per_frame = 140;
  double target_cascade_fpr = 1e-3;
  int max_stages = 6;
  BoostConfig stage;
  int mining_stride = 5;
  std::uint64_t seed = 1;

  friend bool operator==(const CascadeConfig&, const CascadeConfig&) = default;
};

void validate(const CascadeConfig& config);

/// Detection and false-positive rate of one stage, measured on the samples that reached it.
struct StageRates {
  double detection_rate = 1.0;
  double false_positive_rate = 1.0;

  friend bool operator==(const StageRates&, const StageRates&) = default;
};

struct CascadeModel {
  int roi_w = 0;
  int roi_h = 0;
  std::vector<StageModel> stages;
  std::vector<StageRates> rates;
  CascadeConfig config;

  std::size_t dimension() const noexcept { return feature_dimension(roi_w, roi_h); }

  friend bool operator==(const CascadeModel&, const CascadeModel&) = default;
};

/// Checks the structural invariants (>= 1 stage, rates in [0,1], stage dimensions).
void validate(const CascadeModel& model);

/// Overall rates as the products of the per-stage rates.
std::pair<double, double> cascade_rates(std::span<const double> detection_rates,
                                        std::span<const double> false_positive_rates);

struct CascadeDecision {
  bool accepted = false;
  std::size_t stages_evaluated = 0;
};

/// Runs the stages in order and stops at the first rejection.
CascadeDecision evaluate_cascade(const CascadeModel& model, std::span<const double> x);

bool cascade_accepts(const CascadeModel& model, std::span<const double> x);

enum class CascadeStop { TargetFpr, MaxStages, MiningExhausted, WeakLearner, PositivesExhausted };

std::string_view cascade_stop_name(CascadeStop stop) noexcept;

struct PoolComposition {
  std::size_t pure_road = 0;
  std::size_t off_road = 0;
  std::size_t mixed_boundary = 0;
  std::size_t car_overlap = 0;
};

struct StageReport {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  PoolComposition negative_pool;
  std::size_t mined_negatives = 0;  // sliding-window false positives added before this stage
  std::size_t trees = 0;
  StageStop stop = StageStop::MaxTrees;
  double detection_rate = 0.0;
  double false_positive_rate = 0.0;
  double zero_threshold_error = 0.0;
  double error_bound = 1.0;
};

struct CascadeTrainingResult {
  CascadeModel model;
  std::vector<StageReport> stages;
  CascadeStop stop = CascadeStop::MaxStages;
  double detection_rate = 1.0;       // product of stage detection rates
  double false_positive_rate = 1.0;  // product of stage false-positive rates
};

/// Called with the training pool right before each stage is trained.
/// `prefix` holds the stages trained so far.
using PoolObserver = std::function<void(std::size_t stage, std::span<const LabeledSample> pool,
                                        const CascadeModel& prefix)>;

/// Trains stages until the false-positive product reaches the target, the stage
/// budget runs out, or sliding-window mining finds no more false positives.
CascadeTrainingResult train_cascade(std::span<const AnnotatedFrame> frames,
                                    const CascadeConfig& config,
                                    const PoolObserver& observer = {});

}  // namespace roadseg
