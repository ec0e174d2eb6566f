#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specqp {

// Base of everything the library throws. A CLI maps these to exit codes:
// ArgumentError is a usage error, the rest are data errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}
  std::size_t line() const { return line_; }
  // The message without the line prefix.
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

class RejectedRecord : public ParseError {
 public:
  using ParseError::ParseError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A pattern or query the engine refuses to evaluate (all-variable pattern,
// disconnected query, empty query).
class InvalidQuery : public Error {
 public:
  using Error::Error;
};

class InvalidRule : public Error {
 public:
  using Error::Error;
};

class UnsupportedShape : public Error {
 public:
  using Error::Error;
};

// An operator input broke its ordering contract.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NoStats : public Error {
 public:
  using Error::Error;
};

class DegenerateHistogram : public Error {
 public:
  using Error::Error;
};

class RankOutOfRange : public Error {
 public:
  using Error::Error;
};

class PlanInvalid : public Error {
 public:
  using Error::Error;
};

class GuardExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace specqp
