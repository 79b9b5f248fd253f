#include "roadseg/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "roadseg/error.hpp"

namespace roadseg {

namespace {

// Feature-major presorted copy of the training matrix, built once per stage.
class SortedColumns {
 public:
  explicit SortedColumns(std::span<const LabeledSample> samples)
      : rows_(samples.size()), dims_(samples.front().features.size()) {
    values_.resize(rows_ * dims_);
    order_.resize(rows_ * dims_);
    std::vector<std::uint32_t> idx(rows_);
    for (std::size_t f = 0; f < dims_; ++f) {
      std::iota(idx.begin(), idx.end(), 0U);
      std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
        return samples[a].features.values[f] < samples[b].features.values[f];
      });
      for (std::size_t k = 0; k < rows_; ++k) {
        order_[f * rows_ + k] = idx[k];
        values_[f * rows_ + k] = samples[idx[k]].features.values[f];
      }
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dims() const noexcept { return dims_; }
  std::span<const double> values(std::size_t f) const noexcept {
    return {values_.data() + f * rows_, rows_};
  }
  std::span<const std::uint32_t> order(std::size_t f) const noexcept {
    return {order_.data() + f * rows_, rows_};
  }

 private:
  std::size_t rows_;
  std::size_t dims_;
  std::vector<double> values_;
  std::vector<std::uint32_t> order_;
};

struct ClassWeights {
  double pos = 0.0;
  double neg = 0.0;

  double total() const noexcept { return pos + neg; }
  Label majority() const noexcept { return pos >= neg ? Label::Positive : Label::Negative; }
};

// Weighted Gini impurity of a node: W * (1 - p^2 - q^2) == 2 * pos * neg / W.
double gini(const ClassWeights& c) noexcept {
  const double total = c.total();
  return total > 0.0 ? 2.0 * c.pos * c.neg / total : 0.0;
}

struct SplitCandidate {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
  ClassWeights left;
  ClassWeights right;
};

// Impurities closer than this (relative to the node weight) count as tied.
constexpr double kTieTolerance = 1e-12;

// Best split for each node group; group[i] < 0 excludes sample i.
// Ties keep the earlier (lower feature, then lower threshold) candidate.
std::vector<SplitCandidate> best_splits(const SortedColumns& columns, std::span<const int> labels,
                                        std::span<const double> weights,
                                        std::span<const int> group,
                                        std::span<const ClassWeights> totals) {
  const std::size_t groups = totals.size();
  std::vector<SplitCandidate> best(groups);
  std::vector<ClassWeights> running(groups);
  std::vector<double> last_value(groups);
  std::vector<char> seen(groups);

  for (std::size_t f = 0; f < columns.dims(); ++f) {
    std::fill(running.begin(), running.end(), ClassWeights{});
    std::fill(seen.begin(), seen.end(), 0);
    const auto values = columns.values(f);
    const auto order = columns.order(f);
    for (std::size_t k = 0; k < columns.rows(); ++k) {
      const std::uint32_t i = order[k];
      const int g = group[i];
      if (g < 0) continue;
      const auto gi = static_cast<std::size_t>(g);
      const double v = values[k];
      if (seen[gi] != 0 && v > last_value[gi]) {
        const ClassWeights left = running[gi];
        const ClassWeights right{totals[gi].pos - left.pos, totals[gi].neg - left.neg};
        const double impurity = gini(left) + gini(right);
        SplitCandidate& b = best[gi];
        if (!b.found || impurity < b.impurity - kTieTolerance * totals[gi].total()) {
          double mid = last_value[gi] + (v - last_value[gi]) / 2.0;
          if (!(mid > last_value[gi])) mid = v;
          b = {true, static_cast<int>(f), mid, impurity, left, right};
        }
      }
      if (labels[i] > 0) {
        running[gi].pos += weights[i];
      } else {
        running[gi].neg += weights[i];
      }
      last_value[gi] = v;
      seen[gi] = 1;
    }
  }
  return best;
}

DecisionTree fit_tree(const SortedColumns& columns, std::span<const LabeledSample> samples,
                      std::span<const int> labels, std::span<const double> weights) {
  const std::size_t n = samples.size();
  ClassWeights root_total;
  for (std::size_t i = 0; i < n; ++i) {
    (labels[i] > 0 ? root_total.pos : root_total.neg) += weights[i];
  }
  if (gini(root_total) == 0.0) return DecisionTree::leaf(root_total.majority());

  std::vector<int> group(n, 0);
  const auto root = best_splits(columns, labels, weights, group, std::span(&root_total, 1)).front();
  if (!root.found) return DecisionTree::leaf(root_total.majority());

  std::vector<TreeNode> nodes(3);
  nodes[0].feature = root.feature;
  nodes[0].threshold = root.threshold;
  nodes[0].left = 1;
  nodes[0].right = 2;

  const auto f = static_cast<std::size_t>(root.feature);
  for (std::size_t i = 0; i < n; ++i) {
    group[i] = samples[i].features.values[f] < root.threshold ? 0 : 1;
  }
  const std::array<ClassWeights, 2> child_totals{root.left, root.right};
  const auto children = best_splits(columns, labels, weights, group, child_totals);

  for (std::size_t c = 0; c < 2; ++c) {
    TreeNode& node = nodes[c + 1];
    const SplitCandidate& split = children[c];
    if (gini(child_totals[c]) == 0.0 || !split.found) {
      node.leaf = child_totals[c].majority();
      continue;
    }
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = static_cast<int>(nodes.size());
    node.right = node.left + 1;
    TreeNode left_leaf;
    left_leaf.leaf = split.left.majority();
    TreeNode right_leaf;
    right_leaf.leaf = split.right.majority();
    nodes.push_back(left_leaf);
    nodes.push_back(right_leaf);
  }
  return DecisionTree(std::move(nodes));
}

std::size_t check_samples(std::span<const LabeledSample> samples) {
  if (samples.empty()) throw Error(Errc::EmptySamples, "no training samples");
  const std::size_t dim = samples.front().features.size();
  if (dim == 0) throw Error(Errc::DimensionMismatch, "feature vectors are empty");
  for (const auto& s : samples) {
    if (s.features.size() != dim) {
      throw Error(Errc::DimensionMismatch, "samples have inconsistent feature dimensions");
    }
  }
  return dim;
}

void check_weights(std::span<const LabeledSample> samples, std::span<const double> weights) {
  if (weights.size() != samples.size()) {
    throw Error(Errc::LengthMismatch, "weights size " + std::to_string(weights.size()) +
                                          " != sample count " + std::to_string(samples.size()));
  }
}

std::vector<int> label_signs(std::span<const LabeledSample> samples) {
  std::vector<int> labels(samples.size());
  std::transform(samples.begin(), samples.end(), labels.begin(),
                 [](const LabeledSample& s) { return sign(s.label); });
  return labels;
}

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw Error(Errc::InvalidArgument, "tree needs at least one node");
  for (const auto& node : nodes_) {
    if (node.is_leaf()) continue;
    const auto limit = static_cast<int>(nodes_.size());
    if (node.left <= 0 || node.right <= 0 || node.left >= limit || node.right >= limit) {
      throw Error(Errc::InvalidArgument, "tree node has invalid child index");
    }
  }
  if (depth() > 2) throw Error(Errc::InvalidArgument, "tree deeper than two split levels");
}

DecisionTree DecisionTree::leaf(Label label) {
  TreeNode node;
  node.leaf = label;
  return DecisionTree({node});
}

int DecisionTree::depth() const noexcept {
  // Children always sit after their parent, so a single forward pass suffices.
  std::vector<int> level(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& node = nodes_[i];
    if (node.is_leaf()) continue;
    const int next = level[i] + 1;
    deepest = std::max(deepest, next);
    if (static_cast<std::size_t>(node.left) > i) level[static_cast<std::size_t>(node.left)] = next;
    if (static_cast<std::size_t>(node.right) > i) level[static_cast<std::size_t>(node.right)] = next;
  }
  return deepest;
}

std::size_t DecisionTree::leaf_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

int DecisionTree::max_feature() const noexcept {
  int top = -1;
  for (const auto& node : nodes_) top = std::max(top, node.feature);
  return top;
}

void validate(const BoostConfig& config) {
  if (config.max_trees < 1) throw Error(Errc::InvalidConfig, "max_trees must be at least 1");
  if (!(config.target_stage_dr > 0.0 && config.target_stage_dr <= 1.0)) {
    throw Error(Errc::InvalidConfig, "target_stage_dr must lie in (0, 1]");
  }
  if (!(config.target_stage_fpr >= 0.0 && config.target_stage_fpr <= 1.0)) {
    throw Error(Errc::InvalidConfig, "target_stage_fpr must lie in [0, 1]");
  }
  if (!(config.eps_min > 0.0 && config.eps_min < 0.5)) {
    throw Error(Errc::InvalidConfig, "eps_min must lie in (0, 0.5)");
  }
}

std::string_view stage_stop_name(StageStop stop) noexcept {
  switch (stop) {
    case StageStop::MaxTrees: return "max_trees";
    case StageStop::FprReached: return "fpr_reached";
    case StageStop::Separable: return "separable";
    case StageStop::WeakLearner: return "weak_learner";
  }
  return "max_trees";
}

DecisionTree train_tree(std::span<const LabeledSample> samples, std::span<const double> weights) {
  check_samples(samples);
  check_weights(samples, weights);
  const SortedColumns columns(samples);
  return fit_tree(columns, samples, label_signs(samples), weights);
}

double weighted_error(const DecisionTree& tree, std::span<const LabeledSample> samples,
                      std::span<const double> weights) {
  check_weights(samples, weights);
  double error = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (tree.predict(samples[i].features.values) != samples[i].label) error += weights[i];
  }
  return error;
}

StageTrainingResult train_stage(std::span<const LabeledSample> samples, const BoostConfig& config) {
  validate(config);
  const std::size_t dim = check_samples(samples);
  const std::size_t m = samples.size();
  const std::vector<int> labels = label_signs(samples);
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0 || positives == m) {
    throw Error(Errc::SingleLabel, "stage training needs both positive and negative samples");
  }

  const SortedColumns columns(samples);
  std::vector<double> weights(m, 1.0 / static_cast<double>(m));
  std::vector<double> scores(m, 0.0);
  std::vector<int> predictions(m);

  StageTrainingResult result;
  result.model.dimension = dim;
  result.stop = StageStop::MaxTrees;

  for (int t = 0; t < config.max_trees; ++t) {
    DecisionTree tree = fit_tree(columns, samples, labels, weights);
    const double epsilon = weighted_error(tree, samples, weights);
    if (epsilon >= 0.5) {
      result.stop = StageStop::WeakLearner;
      break;
    }
    const double eps = std::max(epsilon, config.eps_min);
    const double alpha = 0.5 * std::log((1.0 - eps) / eps);

    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      predictions[i] = sign(tree.predict(samples[i].features.values));
      weights[i] *= std::exp(-alpha * labels[i] * predictions[i]);
      total += weights[i];
    }
    for (double& w : weights) w /= total;
    for (std::size_t i = 0; i < m; ++i) scores[i] += alpha * predictions[i];

    result.model.trees.push_back(std::move(tree));
    result.model.alphas.push_back(alpha);
    result.rounds.push_back({epsilon, eps, alpha, weights});
    result.error_bound *= 2.0 * std::sqrt(eps * (1.0 - eps));

    if (epsilon <= config.eps_min) {
      result.stop = StageStop::Separable;
      break;
    }
    std::vector<double> positive_scores;
    positive_scores.reserve(positives);
    for (std::size_t i = 0; i < m; ++i) {
      if (labels[i] > 0) positive_scores.push_back(scores[i]);
    }
    const double threshold = threshold_for_detection_rate(std::move(positive_scores),
                                                          config.target_stage_dr);
    std::size_t false_positives = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (labels[i] < 0 && scores[i] >= threshold) ++false_positives;
    }
    if (static_cast<double>(false_positives) <= config.target_stage_fpr * static_cast<double>(m - positives)) {
      result.stop = StageStop::FprReached;
      break;
    }
  }

  if (result.model.trees.empty()) {
    throw Error(Errc::NoWeakLearner, "first weak learner already has weighted error >= 1/2");
  }

  // Same computation as calibrate_threshold, without copying the positive vectors.
  std::vector<double> final_scores(m);
  std::vector<double> positive_scores;
  positive_scores.reserve(positives);
  for (std::size_t i = 0; i < m; ++i) {
    final_scores[i] = stage_score(result.model, samples[i].features.values);
    if (labels[i] > 0) positive_scores.push_back(final_scores[i]);
  }
  result.model.threshold =
      threshold_for_detection_rate(std::move(positive_scores), config.target_stage_dr);

  std::size_t zero_errors = 0;
  std::size_t accepted_pos = 0;
  std::size_t accepted_neg = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double score = final_scores[i];
    const int zero_vote = score >= 0.0 ? 1 : -1;
    if (zero_vote != labels[i]) ++zero_errors;
    if (score >= result.model.threshold) (labels[i] > 0 ? accepted_pos : accepted_neg) += 1;
  }
  result.zero_threshold_error = static_cast<double>(zero_errors) / static_cast<double>(m);
  result.detection_rate = static_cast<double>(accepted_pos) / static_cast<double>(positives);
  result.false_positive_rate = static_cast<double>(accepted_neg) / static_cast<double>(m - positives);
  return result;
}

double stage_score(const StageModel& stage, std::span<const double> x) {
  if (x.size() != stage.dimension) {
    throw Error(Errc::DimensionMismatch, "feature vector has " + std::to_string(x.size()) +
                                             " values, stage expects " +
                                             std::to_string(stage.dimension));
  }
  double score = 0.0;
  for (std::size_t t = 0; t < stage.trees.size(); ++t) {
    score += stage.alphas[t] * sign(stage.trees[t].predict(x));
  }
  return score;
}

bool stage_accepts(const StageModel& stage, std::span<const double> x) {
  return stage_score(stage, x) >= stage.threshold;
}

double threshold_for_detection_rate(std::vector<double> positive_scores, double target_dr) {
  if (positive_scores.empty()) throw Error(Errc::NoPositives, "no positive samples to calibrate on");
  if (!(target_dr > 0.0 && target_dr <= 1.0)) {
    throw Error(Errc::InvalidArgument, "target detection rate must lie in (0, 1]");
  }
  std::sort(positive_scores.begin(), positive_scores.end(), std::greater<>());
  const auto n = static_cast<double>(positive_scores.size());
  // The slack keeps products such as 0.995 * 200 from rounding up past an integer.
  auto k = static_cast<std::size_t>(std::ceil(target_dr * n - 1e-9));
  k = std::clamp<std::size_t>(k, 1, positive_scores.size());
  return positive_scores[k - 1];
}

double calibrate_threshold(const StageModel& stage, std::span<const FeatureVector> positives,
                           double target_dr) {
  std::vector<double> scores;
  scores.reserve(positives.size());
  for (const auto& p : positives) scores.push_back(stage_score(stage, p.values));
  return threshold_for_detection_rate(std::move(scores), target_dr);
}

}  // namespace roadseg
