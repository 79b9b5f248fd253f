#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "roadseg/imaging.hpp"

namespace roadseg {

enum class ObjectClass { Road, LaneMarker, Pedestrian, Car };

std::string_view class_name(ObjectClass cls) noexcept;
/// Inverse of class_name; throws Errc::UnknownClass.
ObjectClass parse_class_name(std::string_view name);

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Closed polygon; the last vertex connects back to the first.
struct Polygon {
  std::vector<Point> vertices;

  friend bool operator==(const Polygon&, const Polygon&) = default;
};

struct AnnotatedObject {
  ObjectClass cls = ObjectClass::Road;
  Polygon polygon;

  friend bool operator==(const AnnotatedObject&, const AnnotatedObject&) = default;
};

struct FrameAnnotation {
  std::string frame_id;
  std::string image_ref;
  int width = 0;
  int height = 0;
  std::vector<AnnotatedObject> objects;

  /// The frame's road polygon, if annotated.
  const Polygon* road() const noexcept;

  friend bool operator==(const FrameAnnotation&, const FrameAnnotation&) = default;
};

enum class RoiRelation { Outside, Partial, Inside };

enum class Provenance { PureRoad, OffRoad, MixedBoundary, CarOverlap };

enum class Label : int { Negative = -1, Positive = 1 };

constexpr int sign(Label label) noexcept { return static_cast<int>(label); }

struct RoiLabel {
  Label label = Label::Negative;
  Provenance provenance = Provenance::OffRoad;

  friend bool operator==(const RoiLabel&, const RoiLabel&) = default;
};

std::string_view provenance_name(Provenance p) noexcept;

/// Even-odd containment where points on an edge count as inside.
bool point_in_polygon(const Point& p, const Polygon& poly);

bool is_simple(const Polygon& poly);

/// Validates polygon shape and bounds; throws on violation.
void validate_polygon(const Polygon& poly, int width, int height);

/// Validates every frame invariant (one road at most, vertices in bounds, simple polygons).
void validate_frame(const FrameAnnotation& frame);

/// Relation of the closed box [x, x+w] x [y, y+h] to the polygon region.
RoiRelation rect_polygon_relation(const Rect& roi, const Polygon& poly);

/// Road/non-road label of a ROI from the frame's road and car polygons.
RoiLabel label_roi(const Rect& roi, const FrameAnnotation& frame);

std::vector<FrameAnnotation> parse_annotation_xml(std::string_view text);
std::string serialize_annotation_xml(const std::vector<FrameAnnotation>& frames);

}  // namespace roadseg
