#pragma once

#include <stdexcept>
#include <string>

namespace nobs {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct CflViolation : Error {
  using Error::Error;
};
struct IncompatibleIc : Error {
  using Error::Error;
};
// Solver hit rho <= 0 or v <= 0; message carries the step index.
struct NonPhysicalState : Error {
  NonPhysicalState(const std::string& msg, long step) : Error(msg), step(step) {}
  long step;
};
struct KindMismatch : Error {
  using Error::Error;
};
struct GridMismatch : Error {
  using Error::Error;
};
struct TimeOutOfRange : Error {
  using Error::Error;
};
struct DivisionGuard : Error {
  using Error::Error;
};
struct ShapeMismatch : Error {
  using Error::Error;
};
struct NotScalarLoss : Error {
  using Error::Error;
};
struct BadMagic : Error {
  using Error::Error;
};
struct HeaderMismatch : Error {
  using Error::Error;
};
struct TruncatedPayload : Error {
  using Error::Error;
};
struct ZeroReference : Error {
  using Error::Error;
};
struct MissingCheckpoint : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace nobs
