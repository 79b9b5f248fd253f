#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "roadseg/annotation.hpp"
#include "roadseg/boosting.hpp"
#include "roadseg/imaging.hpp"
#include "roadseg/random.hpp"

namespace roadseg {

struct SplitSpec {
  std::uint64_t seed = 0;
  std::size_t n_train = 0;
};

struct FrameSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle of frame indices, then prefix (train) / suffix (test).
FrameSplit split_frames(std::size_t frame_count, const SplitSpec& spec);

template <typename Frame>
std::pair<std::vector<Frame>, std::vector<Frame>> split_frames(const std::vector<Frame>& frames,
                                                               const SplitSpec& spec) {
  const FrameSplit split = split_frames(frames.size(), spec);
  std::pair<std::vector<Frame>, std::vector<Frame>> out;
  for (const std::size_t i : split.train) out.first.push_back(frames[i]);
  for (const std::size_t i : split.test) out.second.push_back(frames[i]);
  return out;
}

/// Draws uniformly placed square ROIs until `count_per_class` positives and
/// negatives are collected. Gives up after 10'000 * count_per_class draws per class.
std::vector<LabeledSample> sample_random_rois(const FrameAnnotation& frame, const GrayImage& img,
                                              const GradientField& grad, int count_per_class,
                                              int roi_size, Rng& rng, std::size_t frame_index = 0);

std::vector<LabeledSample> sample_random_rois(const FrameAnnotation& frame, const GrayImage& img,
                                              int count_per_class, int roi_size, Rng& rng,
                                              std::size_t frame_index = 0);

/// Row-major grid of size x size windows with the given stride; empty if the window does not fit.
std::vector<Rect> sliding_windows(int img_w, int img_h, int size, int stride);

}  // namespace roadseg
