#pragma once

#include <stdexcept>
#include <string>

namespace crbm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

struct InvalidArc : Error {
  using Error::Error;
};

struct MeshFailure : Error {
  using Error::Error;
};

struct UnsupportedDegree : Error {
  using Error::Error;
};

struct SingularTangent : Error {
  using Error::Error;
};

struct RankDeficient : Error {
  using Error::Error;
};

struct DegenerateFamily : Error {
  using Error::Error;
};

struct NotApplicable : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct FormatError : Error {
  using Error::Error;
};

}  // namespace crbm
