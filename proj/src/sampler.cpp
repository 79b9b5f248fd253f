#include "roadseg/sampler.hpp"

#include <numeric>
#include <string>

#include "roadseg/error.hpp"
#include "roadseg/features.hpp"

namespace roadseg {

FrameSplit split_frames(std::size_t frame_count, const SplitSpec& spec) {
  if (spec.n_train > frame_count) {
    throw Error(Errc::SplitTooLarge, "n_train " + std::to_string(spec.n_train) + " exceeds " +
                                         std::to_string(frame_count) + " frames");
  }
  std::vector<std::size_t> order(frame_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  rng.shuffle(std::span(order));
  const auto cut = order.begin() + static_cast<std::ptrdiff_t>(spec.n_train);
  return {std::vector<std::size_t>(order.begin(), cut), std::vector<std::size_t>(cut, order.end())};
}

std::vector<LabeledSample> sample_random_rois(const FrameAnnotation& frame, const GrayImage& img,
                                              const GradientField& grad, int count_per_class,
                                              int roi_size, Rng& rng, std::size_t frame_index) {
  if (roi_size < 1) throw Error(Errc::InvalidArgument, "ROI size must be positive");
  if (count_per_class < 0) throw Error(Errc::InvalidArgument, "negative sample count");
  if (img.width() < roi_size || img.height() < roi_size) {
    throw Error(Errc::ImageTooSmall, std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                                         " image cannot hold a " + std::to_string(roi_size) +
                                         "px ROI");
  }
  std::vector<LabeledSample> out;
  if (count_per_class == 0) return out;
  if (frame.road() == nullptr) {
    throw Error(Errc::AttemptCapExceeded,
                "frame '" + frame.frame_id + "' has no road polygon; positives unobtainable");
  }

  const auto cap = 2ULL * 10'000ULL * static_cast<unsigned long long>(count_per_class);
  int positives = 0;
  int negatives = 0;
  out.reserve(2 * static_cast<std::size_t>(count_per_class));
  for (unsigned long long attempt = 0; positives < count_per_class || negatives < count_per_class;
       ++attempt) {
    if (attempt >= cap) {
      throw Error(Errc::AttemptCapExceeded,
                  "frame '" + frame.frame_id + "': collected " + std::to_string(positives) +
                      " positives and " + std::to_string(negatives) + " negatives after " +
                      std::to_string(cap) + " draws");
    }
    const Rect roi{static_cast<int>(rng.between(0, img.width() - roi_size)),
                   static_cast<int>(rng.between(0, img.height() - roi_size)), roi_size, roi_size};
    const RoiLabel label = label_roi(roi, frame);
    int& have = label.label == Label::Positive ? positives : negatives;
    if (have >= count_per_class) continue;
    ++have;
    out.push_back({extract_features(img, grad, roi), label.label, label.provenance,
                   {frame_index, roi}});
  }
  return out;
}

std::vector<LabeledSample> sample_random_rois(const FrameAnnotation& frame, const GrayImage& img,
                                              int count_per_class, int roi_size, Rng& rng,
                                              std::size_t frame_index) {
  return sample_random_rois(frame, img, gradient_field(img), count_per_class, roi_size, rng,
                            frame_index);
}

std::vector<Rect> sliding_windows(int img_w, int img_h, int size, int stride) {
  if (size < 1 || stride < 1) throw Error(Errc::InvalidArgument, "size and stride must be positive");
  std::vector<Rect> windows;
  if (size > img_w || size > img_h) return windows;
  windows.reserve(static_cast<std::size_t>((img_w - size) / stride + 1) *
                  static_cast<std::size_t>((img_h - size) / stride + 1));
  for (int y = 0; y + size <= img_h; y += stride) {
    for (int x = 0; x + size <= img_w; x += stride) windows.push_back({x, y, size, size});
  }
  return windows;
}

}  // namespace roadseg
