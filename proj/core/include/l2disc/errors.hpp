#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace l2disc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A cost or index guard was exceeded (too many points, too deep a level).
class SizeLimitError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed point-set text. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A numerically checked mathematical claim did not hold.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace l2disc
