#pragma once

#include <stdexcept>
#include <string>

namespace psq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong shapes, non-normalized coefficient vectors,
/// invalid configuration fields.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// Two states or operators live on different truncated spaces.
class SpecMismatchError : public Error {
 public:
  using Error::Error;
};

/// A full-space object would exceed the amplitude guard.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// The Fock cutoff cannot represent the requested state to tolerance.
/// Carries the measured norm deficit (probability lost above the cutoff).
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double deficit)
      : Error(what), deficit_(deficit) {}
  double deficit() const noexcept { return deficit_; }

 private:
  double deficit_;
};

/// The heralding event has zero probability (e.g. no squeezed mode overlaps
/// the subtraction mode).
class ZeroWeightError : public Error {
 public:
  using Error::Error;
};

/// A requested target cannot be produced or a measured value falls outside
/// the invertible window.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace psq
