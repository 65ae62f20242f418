#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace adiabatic {

// Base class for every domain error raised by the library. The CLI maps these
// to exit status 1; configuration problems use ConfigError (exit status 2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonUniqueStationary : public Error {
 public:
  explicit NonUniqueStationary(const std::string& what,
                               std::optional<double> s = std::nullopt)
      : Error(what), s_(s) {}

  /// Schedule parameter at which the frozen kernel failed, when known.
  std::optional<double> schedule_parameter() const noexcept { return s_; }

 private:
  std::optional<double> s_;
};

class StationarySolveError : public Error {
 public:
  using Error::Error;
};

class InvalidRateBound : public Error {
 public:
  using Error::Error;
};

class FlatnessUndetected : public Error {
 public:
  using Error::Error;
};

class InconsistentSchedules : public Error {
 public:
  using Error::Error;
};

class DegenerateDecomposition : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

class MixingTimeoutError : public Error {
 public:
  using Error::Error;
};

class SearchTimeoutError : public Error {
 public:
  using Error::Error;
};

class EnumerationCapExceeded : public Error {
 public:
  using Error::Error;
};

class DegenerateClass : public Error {
 public:
  using Error::Error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adiabatic
