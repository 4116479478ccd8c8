#pragma once

#include <stdexcept>
#include <string>

namespace tele {

// Base for every error raised by the library. Callers that only care about
// "something was wrong with the request" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad index, bad dimension, non-normalised input, out-of-range draw.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A measurement was forced onto an outcome whose probability is (numerically) zero.
class DegenerateCollapseError : public Error {
 public:
  using Error::Error;
};

// A protocol step was invoked on a shared pair in the wrong form.
class ProtocolOrderError : public Error {
 public:
  using Error::Error;
};

// Reset ancilla does not carry the current chain amplitudes.
class AncillaMismatchError : public Error {
 public:
  using Error::Error;
};

// Inconsistent ProtocolConfig (e.g. deep resets with unknown amplitudes).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tele
