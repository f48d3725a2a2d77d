#pragma once

#include <stdexcept>
#include <string>

namespace sacov {

struct ErgodicityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TruncationError : std::runtime_error {
  TruncationError(const std::string& msg, int required_level)
      : std::runtime_error(msg), required_level(required_level) {}
  int required_level;
};

struct RateDegenerateError : std::runtime_error {
  RateDegenerateError(const std::string& msg, double rho0)
      : std::runtime_error(msg), rho0(rho0) {}
  double rho0;
};

struct FinerBoundUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateBasisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularGainError : std::runtime_error {
  SingularGainError(const std::string& msg, long step)
      : std::runtime_error(msg), step(step) {}
  long step;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sacov
