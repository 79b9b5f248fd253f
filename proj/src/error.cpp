#include "roadseg/error.hpp"

namespace roadseg {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::BadMagic: return "BadMagic";
    case Errc::MaxvalUnsupported: return "MaxvalUnsupported";
    case Errc::TruncatedPayload: return "TruncatedPayload";
    case Errc::BadDimensions: return "BadDimensions";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::MalformedXml: return "MalformedXml";
    case Errc::UnknownClass: return "UnknownClass";
    case Errc::DegeneratePolygon: return "DegeneratePolygon";
    case Errc::SelfIntersecting: return "SelfIntersecting";
    case Errc::VertexOutOfBounds: return "VertexOutOfBounds";
    case Errc::DuplicateRoad: return "DuplicateRoad";
    case Errc::NoRoadPolygon: return "NoRoadPolygon";
    case Errc::EmptySamples: return "EmptySamples";
    case Errc::SingleLabel: return "SingleLabel";
    case Errc::NoPositives: return "NoPositives";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NoWeakLearner: return "NoWeakLearner";
    case Errc::NegativePoolEmpty: return "NegativePoolEmpty";
    case Errc::BoundViolated: return "BoundViolated";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::ImageTooSmall: return "ImageTooSmall";
    case Errc::AttemptCapExceeded: return "AttemptCapExceeded";
    case Errc::SplitTooLarge: return "SplitTooLarge";
    case Errc::RoadOutOfFrame: return "RoadOutOfFrame";
    case Errc::CarTooLarge: return "CarTooLarge";
    case Errc::ModelFormat: return "ModelFormat";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace roadseg
