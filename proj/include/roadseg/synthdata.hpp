#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "roadseg/dataset.hpp"

namespace roadseg {

/// One synthetic road scene. The road is a trapezoid whose bottom edge lies on
/// the last image row and whose top edge sits at `horizon_y`.
struct SceneParams {
  int width = 640;
  int height = 480;

  double horizon_y = 200.0;
  double top_left_x = 280.0;
  double top_right_x = 360.0;
  double bottom_left_x = 40.0;
  double bottom_right_x = 600.0;

  double road_mean = 80.0;
  double background_mean = 160.0;
  double road_texture = 12.0;        // amplitude of smooth value noise
  double background_texture = 20.0;
  int texture_cell = 16;             // value-noise lattice spacing in pixels

  int car_count = 1;
  int car_min_size = 30;
  int car_max_size = 70;
  double car_mean = 200.0;

  double noise_amplitude = 6.0;      // uniform per-pixel noise in [-a, a]
  std::uint64_t seed = 1;
};

void validate(const SceneParams& params);

/// Renders the scene and returns the exact polygons used for rendering.
/// A pixel belongs to a polygon when its centre (x + 0.5, y + 0.5) does.
AnnotatedFrame generate_scene(const SceneParams& params, const std::string& frame_id = "frame_00000");

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Per-frame parameter ranges; each frame draws uniformly from them.
struct CorpusRanges {
  int width = 640;
  int height = 480;
  Range horizon_y{170.0, 260.0};
  Range top_width{60.0, 160.0};
  Range top_center_x{260.0, 380.0};
  Range bottom_left_x{0.0, 120.0};
  Range bottom_right_x{520.0, 640.0};
  Range road_mean{60.0, 110.0};
  Range background_mean{120.0, 185.0};
  Range road_texture{5.0, 15.0};
  Range background_texture{15.0, 35.0};
  int min_cars = 0;
  int max_cars = 2;
  int car_min_size = 25;
  int car_max_size = 60;
  Range car_mean{185.0, 235.0};
  Range noise_amplitude{3.0, 12.0};
};

std::string frame_name(std::size_t index);

/// Frames with per-frame parameters and seeds derived from `master_seed`.
std::vector<AnnotatedFrame> generate_frames(std::size_t n_frames, std::uint64_t master_seed,
                                            const CorpusRanges& ranges = {});

/// Writes `frame_%05d.pgm` files and `annotations.xml` into `out_dir`.
std::vector<AnnotatedFrame> generate_corpus(std::size_t n_frames, std::uint64_t master_seed,
                                            const std::filesystem::path& out_dir,
                                            const CorpusRanges& ranges = {});

}  // namespace roadseg
