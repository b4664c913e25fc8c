#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clawkit {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the byte offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : Error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifier : public ParseError {
 public:
  UnknownIdentifier(const std::string& name, std::size_t offset)
      : ParseError("unknown identifier \"" + name + "\"", offset), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Expression leaves the supported class (general quotients, irrational constants, ...).
class UnsupportedExpression : public Error {
 public:
  using Error::Error;
};

class CyclicBinding : public Error {
 public:
  using Error::Error;
};

class NonIntegrable : public Error {
 public:
  using Error::Error;
};

class JetOrderOverflow : public Error {
 public:
  using Error::Error;
};

class NotExact : public Error {
 public:
  using Error::Error;
};

class NonIntegrableResidual : public Error {
 public:
  using Error::Error;
};

class InvalidEquation : public Error {
 public:
  using Error::Error;
};

class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

class ResourceCapExceeded : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class NonPeriodicEquation : public NumericError {
 public:
  using NumericError::NumericError;
};

class Divergence : public NumericError {
 public:
  using NumericError::NumericError;
};

class StabilityBound : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateTangent : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace clawkit
