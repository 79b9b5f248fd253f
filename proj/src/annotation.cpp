#include "roadseg/annotation.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "roadseg/error.hpp"

namespace roadseg {

namespace {

constexpr std::array<std::pair<ObjectClass, std::string_view>, 4> kClassNames{{
    {ObjectClass::Road, "road"},
    {ObjectClass::LaneMarker, "lane_marker"},
    {ObjectClass::Pedestrian, "pedestrian"},
    {ObjectClass::Car, "car"},
}};

double cross(const Point& o, const Point& a, const Point& b) noexcept {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const Point& p, const Point& a, const Point& b) noexcept {
  return cross(a, b, p) == 0.0 && std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

int orientation(const Point& a, const Point& b, const Point& c) noexcept {
  const double v = cross(a, b, c);
  return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
}

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) noexcept {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  return (o1 == 0 && on_segment(q1, p1, p2)) || (o2 == 0 && on_segment(q2, p1, p2)) ||
         (o3 == 0 && on_segment(p1, q1, q2)) || (o4 == 0 && on_segment(p2, q1, q2));
}

struct Box {
  double x0, y0, x1, y1;
};

struct Clip {
  bool touches = false;          // segment shares at least one point with the closed box
  bool enters_interior = false;  // segment has a point strictly inside the box
};

// Liang-Barsky clip of segment a->b against the closed box.
Clip clip_segment(const Point& a, const Point& b, const Box& box) noexcept {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const std::array<double, 4> p{-dx, dx, -dy, dy};
  const std::array<double, 4> q{a.x - box.x0, box.x1 - a.x, a.y - box.y0, box.y1 - a.y};
  double t0 = 0.0;
  double t1 = 1.0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return {};
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return {};
  }
  Clip clip;
  clip.touches = true;
  if (t1 - t0 > 1e-12) {
    // A chord of a convex set meets the interior iff its midpoint does.
    const double tm = 0.5 * (t0 + t1);
    const double mx = a.x + tm * dx;
    const double my = a.y + tm * dy;
    clip.enters_interior = mx > box.x0 && mx < box.x1 && my > box.y0 && my < box.y1;
  }
  return clip;
}

std::string format_coord(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 6);
  return std::string(buf.data(), res.ptr);
}

std::string escape_attr(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

template <typename T>
T parse_number(const std::string& text, std::string_view what) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw Error(Errc::MalformedXml, "bad " + std::string(what) + " value '" + text + "'");
  }
  return value;
}

using boost::property_tree::ptree;

std::string required_attr(const ptree& node, const char* name, std::string_view element) {
  const auto attrs = node.get_child_optional("<xmlattr>");
  if (!attrs) throw Error(Errc::MalformedXml, std::string(element) + " lacks attributes");
  const auto value = attrs->get_optional<std::string>(name);
  if (!value) {
    throw Error(Errc::MalformedXml, std::string(element) + " lacks attribute '" + name + "'");
  }
  return *value;
}

bool is_markup_meta(const std::string& key) {
  return key == "<xmlattr>" || key == "<xmlcomment>";
}

AnnotatedObject parse_object(const ptree& node) {
  AnnotatedObject obj;
  obj.cls = parse_class_name(required_attr(node, "class", "object"));
  for (const auto& [key, child] : node) {
    if (is_markup_meta(key)) continue;
    if (key != "pt") throw Error(Errc::MalformedXml, "unexpected element <" + key + "> in object");
    obj.polygon.vertices.push_back({parse_number<double>(required_attr(child, "x", "pt"), "x"),
                                    parse_number<double>(required_attr(child, "y", "pt"), "y")});
  }
  return obj;
}

FrameAnnotation parse_frame(const ptree& node) {
  FrameAnnotation frame;
  frame.frame_id = required_attr(node, "id", "frame");
  frame.image_ref = required_attr(node, "image", "frame");
  frame.width = parse_number<int>(required_attr(node, "width", "frame"), "width");
  frame.height = parse_number<int>(required_attr(node, "height", "frame"), "height");
  for (const auto& [key, child] : node) {
    if (is_markup_meta(key)) continue;
    if (key != "object") throw Error(Errc::MalformedXml, "unexpected element <" + key + "> in frame");
    frame.objects.push_back(parse_object(child));
  }
  validate_frame(frame);
  return frame;
}

}  // namespace

std::string_view class_name(ObjectClass cls) noexcept {
  for (const auto& [c, name] : kClassNames) {
    if (c == cls) return name;
  }
  return "road";
}

ObjectClass parse_class_name(std::string_view name) {
  for (const auto& [c, n] : kClassNames) {
    if (n == name) return c;
  }
  throw Error(Errc::UnknownClass, "unknown object class '" + std::string(name) + "'");
}

std::string_view provenance_name(Provenance p) noexcept {
  switch (p) {
    case Provenance::PureRoad: return "pure_road";
    case Provenance::OffRoad: return "off_road";
    case Provenance::MixedBoundary: return "mixed_boundary";
    case Provenance::CarOverlap: return "car_overlap";
  }
  return "off_road";
}

const Polygon* FrameAnnotation::road() const noexcept {
  for (const auto& obj : objects) {
    if (obj.cls == ObjectClass::Road) return &obj.polygon;
  }
  return nullptr;
}

bool point_in_polygon(const Point& p, const Polygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (on_segment(p, v[j], v[i])) return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y) &&
        p.x < (v[j].x - v[i].x) * (p.y - v[i].y) / (v[j].y - v[i].y) + v[i].x) {
      inside = !inside;
    }
  }
  return inside;
}

bool is_simple(const Polygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    if (a == b) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      const Point& c = v[j];
      const Point& d = v[(j + 1) % n];
      if (adjacent) {
        // Neighbouring edges may only share their common vertex.
        const Point& far_end = (j == i + 1) ? d : c;
        const Point& near_start = (j == i + 1) ? a : b;
        const Point& shared = (j == i + 1) ? b : a;
        if (orientation(near_start, shared, far_end) == 0 &&
            (on_segment(far_end, near_start, shared) || on_segment(near_start, shared, far_end))) {
          return false;
        }
        continue;
      }
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

void validate_polygon(const Polygon& poly, int width, int height) {
  if (poly.vertices.size() < 3) {
    throw Error(Errc::DegeneratePolygon,
                "polygon has " + std::to_string(poly.vertices.size()) + " vertices, need at least 3");
  }
  for (const auto& p : poly.vertices) {
    if (!(p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height)) {
      throw Error(Errc::VertexOutOfBounds, "vertex (" + format_coord(p.x) + ", " + format_coord(p.y) +
                                               ") outside frame");
    }
  }
  if (!is_simple(poly)) throw Error(Errc::SelfIntersecting, "polygon is not simple");
}

void validate_frame(const FrameAnnotation& frame) {
  if (frame.width < 1 || frame.height < 1) {
    throw Error(Errc::BadDimensions, "frame '" + frame.frame_id + "' has non-positive size");
  }
  int roads = 0;
  for (const auto& obj : frame.objects) {
    if (obj.cls == ObjectClass::Road && ++roads > 1) {
      throw Error(Errc::DuplicateRoad, "frame '" + frame.frame_id + "' has more than one road");
    }
    validate_polygon(obj.polygon, frame.width, frame.height);
  }
}

RoiRelation rect_polygon_relation(const Rect& roi, const Polygon& poly) {
  const Box box{static_cast<double>(roi.x), static_cast<double>(roi.y),
                static_cast<double>(roi.x) + roi.w, static_cast<double>(roi.y) + roi.h};
  bool touches = false;
  const auto& v = poly.vertices;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const Clip clip = clip_segment(v[j], v[i], box);
    if (clip.enters_interior) return RoiRelation::Partial;
    touches = touches || clip.touches;
  }
  // The boundary avoids the box interior, so the interior lies wholly on one side.
  const Point center{0.5 * (box.x0 + box.x1), 0.5 * (box.y0 + box.y1)};
  if (point_in_polygon(center, poly)) return RoiRelation::Inside;
  return touches ? RoiRelation::Partial : RoiRelation::Outside;
}

RoiLabel label_roi(const Rect& roi, const FrameAnnotation& frame) {
  const Polygon* road = frame.road();
  if (road == nullptr) {
    throw Error(Errc::NoRoadPolygon, "frame '" + frame.frame_id + "' has no road polygon");
  }
  switch (rect_polygon_relation(roi, *road)) {
    case RoiRelation::Outside: return {Label::Negative, Provenance::OffRoad};
    case RoiRelation::Partial: return {Label::Negative, Provenance::MixedBoundary};
    case RoiRelation::Inside: break;
  }
  for (const auto& obj : frame.objects) {
    if (obj.cls == ObjectClass::Car &&
        rect_polygon_relation(roi, obj.polygon) != RoiRelation::Outside) {
      return {Label::Negative, Provenance::CarOverlap};
    }
  }
  return {Label::Positive, Provenance::PureRoad};
}

std::vector<FrameAnnotation> parse_annotation_xml(std::string_view text) {
  ptree tree;
  try {
    std::istringstream in{std::string(text)};
    boost::property_tree::read_xml(in, tree);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw Error(Errc::MalformedXml, e.what());
  }
  const auto dataset = tree.get_child_optional("dataset");
  if (!dataset) throw Error(Errc::MalformedXml, "missing <dataset> root");
  for (const auto& [key, _] : tree) {
    if (key != "dataset" && key != "<xmlcomment>") {
      throw Error(Errc::MalformedXml, "unexpected top-level element <" + key + ">");
    }
  }

  std::vector<FrameAnnotation> frames;
  for (const auto& [key, child] : *dataset) {
    if (is_markup_meta(key)) continue;
    if (key != "frame") throw Error(Errc::MalformedXml, "unexpected element <" + key + "> in dataset");
    frames.push_back(parse_frame(child));
  }
  return frames;
}

std::string serialize_annotation_xml(const std::vector<FrameAnnotation>& frames) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<dataset>\n";
  for (const auto& frame : frames) {
    out += "  <frame id=\"" + escape_attr(frame.frame_id) + "\" image=\"" +
           escape_attr(frame.image_ref) + "\" width=\"" + std::to_string(frame.width) +
           "\" height=\"" + std::to_string(frame.height) + "\">\n";
    for (const auto& obj : frame.objects) {
      out += "    <object class=\"" + std::string(class_name(obj.cls)) + "\">\n";
      for (const auto& p : obj.polygon.vertices) {
        out += "      <pt x=\"" + format_coord(p.x) + "\" y=\"" + format_coord(p.y) + "\"/>\n";
      }
      out += "    </object>\n";
    }
    out += "  </frame>\n";
  }
  out += "</dataset>\n";
  return out;
}

}  // namespace roadseg
