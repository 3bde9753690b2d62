#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gkdv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed nonlinearity source; offset is the byte position of the problem.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation outside the natural domain (sqrt of negative, ln of zero, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration: unbound parameters, bad intervals, violated constraints.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: nonconvergent quadrature, step-size underflow, blow-up.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Two routes that must agree did not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing an output file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gkdv
