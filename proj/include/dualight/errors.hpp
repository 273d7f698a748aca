#pragma once

#include <stdexcept>
#include <string>

namespace dualight {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct UnknownIntersection : Error {
  using Error::Error;
};
struct InvalidPhase : Error {
  using Error::Error;
};
struct NoValidPhase : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct StaleCache : Error {
  using Error::Error;
};
struct EmptyBuffer : Error {
  using Error::Error;
};
struct MixedScenarioBatch : Error {
  using Error::Error;
};
struct CheckpointMismatch : Error {
  using Error::Error;
};

}  // namespace dualight
