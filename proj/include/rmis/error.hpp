#pragma once

#include <stdexcept>
#include <string>

namespace rmis {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two masks (or a mask and a grid) disagree on width/height.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A byte stream could not be decoded into a label grid.
class DecodeError : public Error {
 public:
  using Error::Error;
};

/// The stream decoded, but into something that is not a single-channel
/// 16-bit-or-less label grid.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent user data: unknown case ids, missing metadata, team sets
/// that do not line up.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Parameters outside their valid range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rmis
