#include "roadseg/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "roadseg/error.hpp"
#include "roadseg/random.hpp"

namespace roadseg {

namespace {

// Bilinearly interpolated lattice of uniform values in [-1, 1].
class ValueNoise {
 public:
  ValueNoise(int width, int height, int cell, Rng& rng)
      : cell_(cell), cols_(width / cell + 2), rows_(height / cell + 2) {
    lattice_.resize(static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_));
    for (double& v : lattice_) v = rng.uniform(-1.0, 1.0);
  }

  double at(int x, int y) const noexcept {
    const int cx = x / cell_;
    const int cy = y / cell_;
    const double fx = static_cast<double>(x % cell_) / cell_;
    const double fy = static_cast<double>(y % cell_) / cell_;
    const double top = lerp(node(cx, cy), node(cx + 1, cy), fx);
    const double bottom = lerp(node(cx, cy + 1), node(cx + 1, cy + 1), fx);
    return lerp(top, bottom, fy);
  }

 private:
  static double lerp(double a, double b, double t) noexcept { return a + (b - a) * t; }
  double node(int cx, int cy) const noexcept {
    return lattice_[static_cast<std::size_t>(cy) * static_cast<std::size_t>(cols_) +
                    static_cast<std::size_t>(cx)];
  }

  int cell_;
  int cols_;
  int rows_;
  std::vector<double> lattice_;
};

Polygon road_polygon(const SceneParams& p) {
  const double bottom = p.height;
  return Polygon{{{p.bottom_left_x, bottom},
                  {p.bottom_right_x, bottom},
                  {p.top_right_x, p.horizon_y},
                  {p.top_left_x, p.horizon_y}}};
}

Polygon rect_polygon(double x, double y, double w, double h) {
  return Polygon{{{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}}};
}

bool in_range(double v, double lo, double hi) { return v >= lo && v <= hi; }

// Road is convex, so a rectangle is inside it when its four corners are.
Polygon place_car(const SceneParams& p, const Polygon& road, Rng& rng) {
  const int w = static_cast<int>(rng.between(p.car_min_size, p.car_max_size));
  const int h = static_cast<int>(rng.between(p.car_min_size, p.car_max_size));
  const int y_lo = static_cast<int>(std::ceil(p.horizon_y));
  const int y_hi = p.height - h;
  const int x_hi = p.width - w;
  if (y_hi >= y_lo && x_hi >= 0) {
    for (int attempt = 0; attempt < 10'000; ++attempt) {
      const auto x = static_cast<double>(rng.between(0, x_hi));
      const auto y = static_cast<double>(rng.between(y_lo, y_hi));
      Polygon car = rect_polygon(x, y, w, h);
      const bool inside = std::all_of(car.vertices.begin(), car.vertices.end(),
                                      [&](const Point& c) { return point_in_polygon(c, road); });
      if (inside) return car;
    }
  }
  throw Error(Errc::CarTooLarge, std::to_string(w) + "x" + std::to_string(h) +
                                     " car does not fit inside the road region");
}

}  // namespace

void validate(const SceneParams& p) {
  if (p.width < 1 || p.height < 1) throw Error(Errc::BadDimensions, "scene size must be positive");
  for (const double mean : {p.road_mean, p.background_mean, p.car_mean}) {
    if (!in_range(mean, 0.0, 255.0)) throw Error(Errc::InvalidArgument, "brightness mean outside [0, 255]");
  }
  if (p.road_texture < 0 || p.background_texture < 0 || p.noise_amplitude < 0 || p.texture_cell < 1) {
    throw Error(Errc::InvalidArgument, "texture and noise amplitudes must be non-negative");
  }
  if (p.car_count < 0 || p.car_min_size < 1 || p.car_max_size < p.car_min_size) {
    throw Error(Errc::InvalidArgument, "invalid car count or size range");
  }
  const bool inside = in_range(p.horizon_y, 0.0, p.height) && p.horizon_y < p.height &&
                      in_range(p.top_left_x, 0.0, p.width) && in_range(p.top_right_x, 0.0, p.width) &&
                      in_range(p.bottom_left_x, 0.0, p.width) &&
                      in_range(p.bottom_right_x, 0.0, p.width);
  if (!inside) throw Error(Errc::RoadOutOfFrame, "road polygon leaves the frame");
  if (!(p.top_left_x < p.top_right_x && p.bottom_left_x < p.bottom_right_x)) {
    throw Error(Errc::RoadOutOfFrame, "road trapezoid edges are inverted");
  }
}

AnnotatedFrame generate_scene(const SceneParams& p, const std::string& frame_id) {
  validate(p);
  Rng rng(p.seed);
  const ValueNoise background_noise(p.width, p.height, p.texture_cell, rng);
  const ValueNoise road_noise(p.width, p.height, p.texture_cell, rng);

  FrameAnnotation annotation;
  annotation.frame_id = frame_id;
  annotation.image_ref = frame_id + ".pgm";
  annotation.width = p.width;
  annotation.height = p.height;
  const Polygon road = road_polygon(p);
  annotation.objects.push_back({ObjectClass::Road, road});
  std::vector<Polygon> cars;
  for (int c = 0; c < p.car_count; ++c) {
    cars.push_back(place_car(p, road, rng));
    annotation.objects.push_back({ObjectClass::Car, cars.back()});
  }

  GrayImage image(p.width, p.height);
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      const Point centre{x + 0.5, y + 0.5};
      double value = p.background_mean + p.background_texture * background_noise.at(x, y);
      if (point_in_polygon(centre, road)) {
        value = p.road_mean + p.road_texture * road_noise.at(x, y);
        for (const Polygon& car : cars) {
          if (point_in_polygon(centre, car)) {
            value = p.car_mean + p.road_texture * road_noise.at(x, y);
            break;
          }
        }
      }
      if (p.noise_amplitude > 0.0) value += rng.uniform(-p.noise_amplitude, p.noise_amplitude);
      image.set(x, y, static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L)));
    }
  }
  return {std::move(annotation), std::move(image)};
}

std::string frame_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%05zu", index);
  return buf;
}

std::vector<AnnotatedFrame> generate_frames(std::size_t n_frames, std::uint64_t master_seed,
                                            const CorpusRanges& r) {
  if (n_frames < 1) throw Error(Errc::InvalidArgument, "corpus needs at least one frame");
  std::vector<AnnotatedFrame> frames;
  frames.reserve(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    Rng rng(derive_seed(master_seed, i));
    auto draw = [&](const Range& range) { return rng.uniform(range.lo, range.hi); };
    SceneParams p;
    p.width = r.width;
    p.height = r.height;
    // Integer vertices survive the six-decimal XML round trip exactly.
    p.horizon_y = std::round(draw(r.horizon_y));
    const double top_half = draw(r.top_width) / 2.0;
    const double top_center = draw(r.top_center_x);
    p.top_left_x = std::round(std::max(0.0, top_center - top_half));
    p.top_right_x = std::round(std::min<double>(r.width, top_center + top_half));
    p.bottom_left_x = std::round(draw(r.bottom_left_x));
    p.bottom_right_x = std::round(draw(r.bottom_right_x));
    p.road_mean = draw(r.road_mean);
    p.background_mean = draw(r.background_mean);
    p.road_texture = draw(r.road_texture);
    p.background_texture = draw(r.background_texture);
    p.car_count = static_cast<int>(rng.between(r.min_cars, r.max_cars));
    p.car_min_size = r.car_min_size;
    p.car_max_size = r.car_max_size;
    p.car_mean = draw(r.car_mean);
    p.noise_amplitude = draw(r.noise_amplitude);
    p.seed = rng.next();
    frames.push_back(generate_scene(p, frame_name(i)));
  }
  return frames;
}

std::vector<AnnotatedFrame> generate_corpus(std::size_t n_frames, std::uint64_t master_seed,
                                            const std::filesystem::path& out_dir,
                                            const CorpusRanges& ranges) {
  auto frames = generate_frames(n_frames, master_seed, ranges);
  save_dataset(out_dir, frames);
  return frames;
}

}  // namespace roadseg
