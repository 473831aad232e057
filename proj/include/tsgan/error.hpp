#pragma once

#include <stdexcept>
#include <string>

namespace tsgan {

// Error taxonomy shared by the library and the CLI. The CLI maps each kind
// onto a distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class DataError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "data"; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

class ShapeError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "shape"; }
};

// Raised when a higher-order derivative is requested from a graph (or an op)
// that did not record one.
class CapabilityError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "capability"; }
};

class FormatError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "format"; }
};

class DivergenceError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "divergence"; }
};

}  // namespace tsgan
