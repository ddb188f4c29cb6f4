#pragma once

#include <stdexcept>
#include <string>

namespace gpsing {

/// Base class for every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter left the admissible window; carries the violated inequality.
class RegimeViolation : public Error {
 public:
  RegimeViolation(std::string field, std::string bound)
      : Error("regime violation: " + field + " must satisfy " + bound),
        field_(std::move(field)),
        bound_(std::move(bound)) {}
  const std::string& field() const noexcept { return field_; }
  const std::string& bound() const noexcept { return bound_; }

 private:
  std::string field_;
  std::string bound_;
};

class NonpositiveAStar : public Error {
 public:
  NonpositiveAStar() : Error("a* must be positive") {}
};

class BadGridSpec : public Error {
 public:
  using Error::Error;
};

class WeightNotIntegrable : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  GridMismatch() : Error("fields live on different grids") {}
};

class ZeroField : public Error {
 public:
  ZeroField() : Error("field is identically zero") {}
};

class FlowDiverged : public Error {
 public:
  using Error::Error;
};

class GridTooCoarse : public Error {
 public:
  using Error::Error;
};

class NoBracket : public Error {
 public:
  using Error::Error;
};

class BisectionStalled : public Error {
 public:
  using Error::Error;
};

class ProfileMissing : public Error {
 public:
  ProfileMissing() : Error("ground-state profile w not available") {}
};

class NonpositiveTail : public Error {
 public:
  NonpositiveTail() : Error("field is not positive on the fit window") {}
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class IOFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace gpsing
