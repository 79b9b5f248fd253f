#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "roadseg/annotation.hpp"
#include "roadseg/features.hpp"

namespace roadseg {

/// Where a training sample came from; used by pool audits.
struct SampleOrigin {
  std::size_t frame = 0;
  Rect roi;

  friend bool operator==(const SampleOrigin&, const SampleOrigin&) = default;
};

struct LabeledSample {
  FeatureVector features;
  Label label = Label::Negative;
  Provenance provenance = Provenance::OffRoad;
  SampleOrigin origin;
};

/// Node of a binary decision tree. Samples with x[feature] < threshold go left.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Label leaf = Label::Positive;

  bool is_leaf() const noexcept { return feature < 0; }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Weak learner with at most two split levels (four leaves); node 0 is the root.
class DecisionTree {
 public:
  DecisionTree() : nodes_{TreeNode{}} {}
  explicit DecisionTree(std::vector<TreeNode> nodes);

  static DecisionTree leaf(Label label);

  Label predict(std::span<const double> x) const noexcept {
    const TreeNode* node = &nodes_[0];
    while (!node->is_leaf()) {
      node = &nodes_[static_cast<std::size_t>(
          x[static_cast<std::size_t>(node->feature)] < node->threshold ? node->left : node->right)];
    }
    return node->leaf;
  }

  std::span<const TreeNode> nodes() const noexcept { return nodes_; }
  const TreeNode& root() const noexcept { return nodes_.front(); }
  int depth() const noexcept;
  std::size_t leaf_count() const noexcept;
  /// Largest feature index referenced, or -1 for a single leaf.
  int max_feature() const noexcept;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

/// One AdaBoost stage: weighted vote of trees against a pass threshold.
struct StageModel {
  std::vector<DecisionTree> trees;
  std::vector<double> alphas;
  double threshold = 0.0;
  std::size_t dimension = 0;

  friend bool operator==(const StageModel&, const StageModel&) = default;
};

struct BoostConfig {
  int max_trees = 40;
  double target_stage_dr = 0.995;
  /// Stop adding trees once the calibrated stage accepts at most this fraction of its negatives.
  double target_stage_fpr = 0.5;
  double eps_min = 1e-10;

  friend bool operator==(const BoostConfig&, const BoostConfig&) = default;
};

void validate(const BoostConfig& config);

enum class StageStop {
  MaxTrees,
  FprReached,
  Separable,     // epsilon hit the eps_min clamp
  WeakLearner,   // epsilon >= 1/2, round rejected
};

std::string_view stage_stop_name(StageStop stop) noexcept;

/// Per-round bookkeeping of train_stage.
struct BoostRound {
  double epsilon = 0.0;          // weighted error before clamping
  double epsilon_clamped = 0.0;  // max(epsilon, eps_min), used for alpha
  double alpha = 0.0;
  std::vector<double> weights;   // normalized weights after this round's update
};

struct StageTrainingResult {
  StageModel model;
  std::vector<BoostRound> rounds;
  StageStop stop = StageStop::MaxTrees;
  /// Training misclassification rate of sign(f(x)) (threshold 0).
  double zero_threshold_error = 0.0;
  /// prod_t 2 sqrt(eps_t (1 - eps_t)) over the clamped epsilons.
  double error_bound = 1.0;
  /// Rates of the calibrated stage on its own training set.
  double detection_rate = 0.0;
  double false_positive_rate = 0.0;
};

/// Greedy depth-2 tree minimizing weighted Gini impurity.
DecisionTree train_tree(std::span<const LabeledSample> samples, std::span<const double> weights);

double weighted_error(const DecisionTree& tree, std::span<const LabeledSample> samples,
                      std::span<const double> weights);

StageTrainingResult train_stage(std::span<const LabeledSample> samples, const BoostConfig& config);

double stage_score(const StageModel& stage, std::span<const double> x);
bool stage_accepts(const StageModel& stage, std::span<const double> x);

/// Largest threshold accepting at least `target_dr` of `positives`.
double calibrate_threshold(const StageModel& stage, std::span<const FeatureVector> positives,
                           double target_dr);

/// Threshold selection on precomputed positive scores (sorted descending, indexed at ceil(dr*n)).
double threshold_for_detection_rate(std::vector<double> positive_scores, double target_dr);

}  // namespace roadseg
