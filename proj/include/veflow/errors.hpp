#pragma once

#include <stdexcept>
#include <string>

namespace veflow {

// Error hierarchy shared by all modules. Everything derives from Error so
// callers can catch the whole family at the CLI boundary.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error {
  using Error::Error;
};
struct InvalidDelta : Error {
  using Error::Error;
};
struct NotPositiveDefinite : Error {
  using Error::Error;
};
struct InvalidRect : Error {
  using Error::Error;
};
struct SelfIntersectingInterface : Error {
  using Error::Error;
};
struct DegenerateSegment : Error {
  using Error::Error;
};
struct ShapeMismatch : Error {
  using Error::Error;
};
struct PointOutsideMesh : Error {
  using Error::Error;
};
struct SpanDeficient : Error {
  using Error::Error;
};
struct SingularSystem : Error {
  using Error::Error;
};
struct NoConvergence : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace veflow
