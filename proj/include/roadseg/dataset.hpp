#pragma once

#include <filesystem>
#include <vector>

#include "roadseg/annotation.hpp"
#include "roadseg/imaging.hpp"

namespace roadseg {

struct AnnotatedFrame {
  FrameAnnotation annotation;
  GrayImage image;
};

inline constexpr const char* kAnnotationFile = "annotations.xml";

/// Reads `<dir>/annotations.xml` and every frame image it references (paths relative to `dir`).
std::vector<AnnotatedFrame> load_dataset(const std::filesystem::path& dir);

/// Writes the images under their `image_ref` names plus `annotations.xml`.
void save_dataset(const std::filesystem::path& dir, const std::vector<AnnotatedFrame>& frames);

}  // namespace roadseg
