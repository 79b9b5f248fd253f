#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace roadseg {

enum class Errc {
  InvalidArgument,
  // imaging
  BadMagic,
  MaxvalUnsupported,
  TruncatedPayload,
  BadDimensions,
  OutOfBounds,
  // annotation
  MalformedXml,
  UnknownClass,
  DegeneratePolygon,
  SelfIntersecting,
  VertexOutOfBounds,
  DuplicateRoad,
  NoRoadPolygon,
  // boosting / cascade
  EmptySamples,
  SingleLabel,
  NoPositives,
  DimensionMismatch,
  NoWeakLearner,
  NegativePoolEmpty,
  BoundViolated,
  LengthMismatch,
  // sampler
  ImageTooSmall,
  AttemptCapExceeded,
  SplitTooLarge,
  // synthdata
  RoadOutOfFrame,
  CarTooLarge,
  // persistence / config
  ModelFormat,
  InvalidConfig,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

/// Exception carrying a machine-checkable error code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace roadseg
