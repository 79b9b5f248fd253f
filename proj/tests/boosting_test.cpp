#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>

#include "roadseg/boosting.hpp"
#include "roadseg/error.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace roadseg {
namespace {

using testing::expect_errc;
using testing::has_both_labels;
using testing::oracle_optimal_tree_error;
using testing::oracle_root_split;
using testing::oracle_stump_error;
using testing::reference_adaboost;
using testing::make_sample;
using testing::random_instance;
using testing::random_weights;
using testing::uniform_weights;

constexpr Label P = Label::Positive;
constexpr Label N = Label::Negative;

std::vector<LabeledSample> one_dim(const std::vector<double>& xs, const std::vector<Label>& ys) {
  std::vector<LabeledSample> out;
  for (std::size_t i = 0; i < xs.size(); ++i) out.push_back(make_sample({xs[i]}, ys[i]));
  return out;
}

TEST(TrainTree, OneDimensionalSplit) {
  const auto s = one_dim({0, 1, 2, 3}, {N, N, P, P});
  const auto w = uniform_weights(4);
  const auto tree = train_tree(s, w);
  EXPECT_EQ(tree.root().feature, 0);
  EXPECT_EQ(tree.root().threshold, 1.5);
  EXPECT_EQ(weighted_error(tree, s, w), 0.0);

  const auto oracle = oracle_root_split(s, w);
  ASSERT_TRUE(oracle);
  EXPECT_EQ(oracle->threshold, 1.5);
  EXPECT_EQ(oracle->impurity, 0.0);
}

TEST(TrainTree, SingleClassGivesLeaf) {
  const auto s = one_dim({0, 1, 2}, {P, P, P});
  const auto tree = train_tree(s, uniform_weights(3));
  EXPECT_TRUE(tree.root().is_leaf());
  EXPECT_EQ(tree.root().leaf, P);
  EXPECT_EQ(tree.leaf_count(), 1u);
  EXPECT_EQ(weighted_error(tree, s, uniform_weights(3)), 0.0);
}

TEST(TrainTree, LeafTieGoesPositive) {
  const auto s = one_dim({5, 5}, {N, P});
  const auto tree = train_tree(s, uniform_weights(2));
  EXPECT_TRUE(tree.root().is_leaf());
  EXPECT_EQ(tree.root().leaf, P);
}

TEST(TrainTree, ImpurityTieKeepsLowerFeatureAndThreshold) {
  // Features 0 and 1 separate equally well; feature 0 wins. Within feature 2 the
  // candidates 0.5 and 2.5 tie on impurity alone.
  std::vector<LabeledSample> s{make_sample({0, 0}, N), make_sample({1, 1}, P)};
  const auto tree = train_tree(s, uniform_weights(2));
  EXPECT_EQ(tree.root().feature, 0);
  EXPECT_EQ(tree.root().threshold, 0.5);

  const auto t2 = train_tree(one_dim({0, 1, 2, 3}, {N, P, P, N}), uniform_weights(4));
  EXPECT_EQ(t2.root().threshold, 0.5);
}

TEST(TrainTree, RootSplitMatchesBruteForceOracle) {
  std::mt19937_64 gen(101);
  int compared = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t n = 2 + gen() % 7;
    const std::size_t dims = 1 + gen() % 3;
    const auto s = random_instance(gen, n, dims, 1 + static_cast<int>(gen() % 6));
    const auto w = (trial % 2 == 0) ? uniform_weights(n) : random_weights(gen, n);
    const auto tree = train_tree(s, w);
    const auto oracle = oracle_root_split(s, w);
    if (!has_both_labels(s) || !oracle) {
      EXPECT_TRUE(tree.root().is_leaf());
      continue;
    }
    ASSERT_FALSE(tree.root().is_leaf()) << "trial " << trial;
    EXPECT_EQ(tree.root().feature, oracle->feature) << "trial " << trial;
    EXPECT_EQ(tree.root().threshold, oracle->threshold) << "trial " << trial;
    ++compared;

    const double err = weighted_error(tree, s, w);
    EXPECT_LE(err, oracle_stump_error(s, w, *oracle) + 1e-12) << "trial " << trial;
    EXPECT_GE(err, oracle_optimal_tree_error(s, w) - 1e-12) << "trial " << trial;
  }
  EXPECT_GT(compared, 1500);
}

TEST(TrainTree, StructuralInvariants) {
  std::mt19937_64 gen(103);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + gen() % 30;
    const std::size_t dims = 1 + gen() % 6;
    const auto s = random_instance(gen, n, dims, 8);
    const auto tree = train_tree(s, random_weights(gen, n));
    EXPECT_LE(tree.depth(), 2);
    EXPECT_LE(tree.leaf_count(), 4u);
    EXPECT_LT(tree.max_feature(), static_cast<int>(dims));
  }
}

TEST(TrainTree, Errors) {
  const std::vector<LabeledSample> none;
  const std::vector<double> no_weights;
  expect_errc(Errc::EmptySamples, [&] { train_tree(none, no_weights); });
  const auto s = one_dim({0, 1}, {N, P});
  expect_errc(Errc::LengthMismatch, [&] { train_tree(s, uniform_weights(3)); });
}

TEST(DecisionTree, RejectsDeepOrBrokenTrees) {
  std::vector<TreeNode> deep(7);
  deep[0] = {0, 0.5, 1, 2, P};
  deep[1] = {0, 0.5, 3, 4, P};
  deep[3] = {0, 0.5, 5, 6, P};
  expect_errc(Errc::InvalidArgument, [&] { DecisionTree{deep}; });
  std::vector<TreeNode> dangling{{0, 0.5, 1, 9, P}, {}};
  expect_errc(Errc::InvalidArgument, [&] { DecisionTree{dangling}; });
}

TEST(WeightedError, Examples) {
  const auto s = one_dim({0, 1, 2, 3}, {N, N, P, P});
  const auto perfect = train_tree(s, uniform_weights(4));
  EXPECT_EQ(weighted_error(perfect, s, uniform_weights(4)), 0.0);
  EXPECT_EQ(weighted_error(DecisionTree::leaf(P), s, uniform_weights(4)), 0.5);

  const auto s8 = one_dim({0, 1, 2, 3, 4, 5, 6, 7}, {N, N, N, N, P, P, P, P});
  const std::vector<TreeNode> nodes{{0, 2.5, 1, 2, P}, {-1, 0, -1, -1, N}, {-1, 0, -1, -1, P}};
  const DecisionTree off_by_one(nodes);  // misclassifies x = 3 only
  EXPECT_EQ(weighted_error(off_by_one, s8, uniform_weights(8)), 0.125);
}

TEST(TrainStage, QuarterErrorGivesHalfLogThree) {
  // Identical features: the only learner is a majority leaf with error 1/4.
  const auto s = one_dim({0, 0, 0, 0}, {P, P, P, N});
  const auto r = train_stage(s, BoostConfig{});
  ASSERT_EQ(r.rounds.size(), 1u);
  EXPECT_DOUBLE_EQ(r.rounds[0].epsilon, 0.25);
  EXPECT_NEAR(r.rounds[0].alpha, 0.5 * std::log(3.0), 1e-15);
  EXPECT_NEAR(r.rounds[0].alpha, 0.5493, 1e-4);
  // After the update the misclassified sample holds half the weight, so the
  // next round sees error 1/2 and is rejected.
  EXPECT_NEAR(r.rounds[0].weights[3], 0.5, 1e-12);
  EXPECT_EQ(r.stop, StageStop::WeakLearner);
  EXPECT_EQ(r.model.trees.size(), 1u);
}

TEST(TrainStage, ZeroErrorIsClamped) {
  const auto s = one_dim({0, 1, 2, 3}, {N, N, P, P});
  const auto r = train_stage(s, BoostConfig{});
  ASSERT_EQ(r.rounds.size(), 1u);
  EXPECT_EQ(r.rounds[0].epsilon, 0.0);
  EXPECT_EQ(r.rounds[0].epsilon_clamped, 1e-10);
  EXPECT_NEAR(r.rounds[0].alpha, 11.5129, 1e-4);
  EXPECT_EQ(r.stop, StageStop::Separable);
  EXPECT_EQ(r.zero_threshold_error, 0.0);
  EXPECT_EQ(r.detection_rate, 1.0);
  EXPECT_EQ(r.false_positive_rate, 0.0);
}

TEST(TrainStage, Errors) {
  expect_errc(Errc::SingleLabel, [] { train_stage(one_dim({0, 1}, {P, P}), BoostConfig{}); });
  expect_errc(Errc::NoWeakLearner, [] { train_stage(one_dim({0, 0}, {P, N}), BoostConfig{}); });
  BoostConfig bad;
  bad.max_trees = 0;
  expect_errc(Errc::InvalidConfig, [&] { train_stage(one_dim({0, 1}, {N, P}), bad); });
}

TEST(TrainStage, MatchesReferenceAdaBoost) {
  std::mt19937_64 gen(107);
  int rounds_compared = 0;
  for (int trial = 0; trial < 1500; ++trial) {
    const std::size_t n = 2 + gen() % 7;
    const std::size_t dims = 1 + gen() % 3;
    const auto s = random_instance(gen, n, dims, 2 + static_cast<int>(gen() % 4));
    if (!has_both_labels(s)) continue;
    BoostConfig cfg;
    cfg.max_trees = 1 + static_cast<int>(gen() % 8);
    cfg.target_stage_fpr = (trial % 3 == 0) ? 0.0 : 0.5;
    const auto ref = reference_adaboost(s, cfg);
    if (ref.empty()) {
      expect_errc(Errc::NoWeakLearner, [&] { train_stage(s, cfg); });
      continue;
    }
    const auto got = train_stage(s, cfg);
    ASSERT_EQ(got.rounds.size(), ref.size()) << "trial " << trial;
    for (std::size_t t = 0; t < ref.size(); ++t) {
      EXPECT_NEAR(got.rounds[t].epsilon, ref[t].epsilon, 1e-9);
      EXPECT_NEAR(got.rounds[t].alpha, ref[t].alpha, 1e-9);
      ASSERT_EQ(got.rounds[t].weights.size(), n);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(got.rounds[t].weights[i], ref[t].weights[i], 1e-9);
      ++rounds_compared;
    }
  }
  EXPECT_GT(rounds_compared, 1000);
}

TEST(TrainStage, RoundInvariants) {
  std::mt19937_64 gen(109);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 20 + gen() % 60;
    const auto s = random_instance(gen, n, 1 + gen() % 5, 10);
    if (!has_both_labels(s)) continue;
    BoostConfig cfg;
    cfg.max_trees = 15;
    cfg.target_stage_fpr = 0.0;
    StageTrainingResult r;
    try {
      r = train_stage(s, cfg);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::NoWeakLearner);
      continue;
    }
    std::vector<double> previous = uniform_weights(n);
    for (std::size_t t = 0; t < r.rounds.size(); ++t) {
      const auto& round = r.rounds[t];
      EXPECT_GT(round.alpha, 0.0);
      EXPECT_LT(round.epsilon, 0.5);
      double total = 0.0;
      for (const double w : round.weights) {
        EXPECT_GE(w, 0.0);
        total += w;
      }
      EXPECT_NEAR(total, 1.0, 1e-9);
      // The tree that was just added is a coin flip under the updated weights.
      if (round.epsilon > cfg.eps_min) {
        EXPECT_NEAR(weighted_error(r.model.trees[t], s, round.weights), 0.5, 1e-6);
      }
      // The tree was trained on the previous round's weights.
      EXPECT_EQ(r.model.trees[t], train_tree(s, previous));
      previous = round.weights;
    }
    EXPECT_LE(r.zero_threshold_error, r.error_bound + 1e-12);
  }
}

TEST(TrainStage, Deterministic) {
  std::mt19937_64 gen(113);
  const auto s = random_instance(gen, 80, 4, 12);
  EXPECT_EQ(train_stage(s, BoostConfig{}).model, train_stage(s, BoostConfig{}).model);
}

StageModel two_tree_stage() {
  StageModel stage;
  stage.dimension = 1;
  // Tree 1 always says +1; tree 2 says -1 below 0.5.
  stage.trees.push_back(DecisionTree::leaf(P));
  stage.trees.push_back(DecisionTree({{0, 0.5, 1, 2, P}, {-1, 0, -1, -1, N}, {-1, 0, -1, -1, P}}));
  stage.alphas = {0.5, 0.3};
  return stage;
}

TEST(StageScore, Examples) {
  StageModel one;
  one.dimension = 1;
  one.trees.push_back(DecisionTree::leaf(P));
  one.alphas = {0.5};
  const std::vector<double> x0{0.0};
  EXPECT_EQ(stage_score(one, x0), 0.5);

  const auto stage = two_tree_stage();
  EXPECT_DOUBLE_EQ(stage_score(stage, x0), 0.2);

  StageModel negated = stage;
  for (auto& tree : negated.trees) {
    std::vector<TreeNode> nodes(tree.nodes().begin(), tree.nodes().end());
    for (auto& node : nodes) node.leaf = node.leaf == P ? N : P;
    tree = DecisionTree(std::move(nodes));
  }
  for (const double x : {0.0, 1.0}) {
    const std::vector<double> v{x};
    EXPECT_EQ(stage_score(negated, v), -stage_score(stage, v));
  }

  const std::vector<double> wrong{0.0, 1.0};
  expect_errc(Errc::DimensionMismatch, [&] { stage_score(stage, wrong); });
  expect_errc(Errc::DimensionMismatch, [&] { stage_accepts(stage, wrong); });
}

TEST(StageAccepts, ThresholdRule) {
  auto stage = two_tree_stage();
  const std::vector<double> x{0.0};  // score 0.2
  stage.threshold = 0.0;
  EXPECT_TRUE(stage_accepts(stage, x));
  stage.threshold = 0.25;
  EXPECT_FALSE(stage_accepts(stage, x));
  stage.threshold = -std::numeric_limits<double>::infinity();
  EXPECT_TRUE(stage_accepts(stage, x));
  EXPECT_TRUE(stage_accepts(stage, std::vector<double>{1.0}));
}

TEST(StageAccepts, LoweringThresholdGrowsAcceptedSet) {
  std::mt19937_64 gen(127);
  const auto s = random_instance(gen, 120, 3, 20);
  auto stage = train_stage(s, BoostConfig{}).model;
  std::vector<double> thresholds{std::numeric_limits<double>::infinity()};
  for (const auto& x : s) thresholds.push_back(stage_score(stage, x.features.values));
  thresholds.push_back(-std::numeric_limits<double>::infinity());
  std::sort(thresholds.rbegin(), thresholds.rend());
  std::set<std::size_t> prev;
  for (const double t : thresholds) {
    stage.threshold = t;
    std::set<std::size_t> accepted;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (stage_accepts(stage, s[i].features.values)) accepted.insert(i);
    }
    EXPECT_TRUE(std::includes(accepted.begin(), accepted.end(), prev.begin(), prev.end()));
    prev = std::move(accepted);
  }
  EXPECT_EQ(prev.size(), s.size());
}

TEST(Calibration, SortAndIndex) {
  EXPECT_EQ(threshold_for_detection_rate({0.6, 0.9, 0.7, 0.8}, 0.75), 0.7);
  EXPECT_EQ(threshold_for_detection_rate({0.6, 0.9, 0.7, 0.8}, 1.0), 0.6);
  EXPECT_EQ(threshold_for_detection_rate({0.6, 0.9, 0.7, 0.8}, 0.01), 0.9);
  expect_errc(Errc::NoPositives, [] { threshold_for_detection_rate({}, 0.9); });
  expect_errc(Errc::InvalidArgument, [] { threshold_for_detection_rate({1.0}, 0.0); });
}

TEST(Calibration, ReachesTargetDetectionRate) {
  std::mt19937_64 gen(131);
  const auto s = random_instance(gen, 200, 3, 30);
  const auto stage = train_stage(s, BoostConfig{}).model;
  std::vector<FeatureVector> positives;
  for (const auto& x : s) {
    if (x.label == P) positives.push_back(x.features);
  }
  for (const double target : {0.5, 0.9, 0.995, 1.0}) {
    auto calibrated = stage;
    calibrated.threshold = calibrate_threshold(stage, positives, target);
    std::size_t accepted = 0;
    for (const auto& p : positives) accepted += stage_accepts(calibrated, p.values) ? 1 : 0;
    EXPECT_GE(static_cast<double>(accepted), target * static_cast<double>(positives.size()) - 1e-9);
    // Largest such threshold: nudging it up must lose detection rate below target.
    auto raised = calibrated;
    raised.threshold = std::nextafter(calibrated.threshold, std::numeric_limits<double>::infinity());
    std::size_t accepted_raised = 0;
    for (const auto& p : positives) accepted_raised += stage_accepts(raised, p.values) ? 1 : 0;
    EXPECT_LT(static_cast<double>(accepted_raised), target * static_cast<double>(positives.size()));
  }
  expect_errc(Errc::NoPositives, [&] { calibrate_threshold(stage, {}, 0.9); });
}

TEST(Calibration, StageThresholdMatchesCalibration) {
  std::mt19937_64 gen(137);
  const auto s = random_instance(gen, 150, 4, 15);
  const auto r = train_stage(s, BoostConfig{});
  std::vector<FeatureVector> positives;
  for (const auto& x : s) {
    if (x.label == P) positives.push_back(x.features);
  }
  EXPECT_EQ(r.model.threshold, calibrate_threshold(r.model, positives, BoostConfig{}.target_stage_dr));
}

TEST(BoostConfig, Validation) {
  BoostConfig c;
  EXPECT_NO_THROW(validate(c));
  c.target_stage_dr = 0.0;
  expect_errc(Errc::InvalidConfig, [&] { validate(c); });
  c = {};
  c.eps_min = 0.5;
  expect_errc(Errc::InvalidConfig, [&] { validate(c); });
}

}  // namespace
}  // namespace roadseg
