#include "roadseg/dataset.hpp"

#include <fstream>
#include <sstream>

#include "roadseg/error.hpp"

namespace roadseg {

std::vector<AnnotatedFrame> load_dataset(const std::filesystem::path& dir) {
  const auto xml_path = dir / kAnnotationFile;
  std::ifstream in(xml_path);
  if (!in) throw Error(Errc::Io, "cannot open " + xml_path.string());
  std::ostringstream text;
  text << in.rdbuf();

  std::vector<AnnotatedFrame> frames;
  for (auto& annotation : parse_annotation_xml(text.str())) {
    GrayImage image = read_pgm_file(dir / annotation.image_ref);
    if (image.width() != annotation.width || image.height() != annotation.height) {
      throw Error(Errc::BadDimensions, "image " + annotation.image_ref + " is " +
                                           std::to_string(image.width()) + "x" +
                                           std::to_string(image.height()) + ", annotation says " +
                                           std::to_string(annotation.width) + "x" +
                                           std::to_string(annotation.height));
    }
    frames.push_back({std::move(annotation), std::move(image)});
  }
  return frames;
}

void save_dataset(const std::filesystem::path& dir, const std::vector<AnnotatedFrame>& frames) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create " + dir.string() + ": " + ec.message());

  std::vector<FrameAnnotation> annotations;
  annotations.reserve(frames.size());
  for (const auto& frame : frames) {
    write_pgm_file(dir / frame.annotation.image_ref, frame.image);
    annotations.push_back(frame.annotation);
  }
  std::ofstream out(dir / kAnnotationFile, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot create " + (dir / kAnnotationFile).string());
  out << serialize_annotation_xml(annotations);
  if (!out) throw Error(Errc::Io, "write failed for " + (dir / kAnnotationFile).string());
}

}  // namespace roadseg
