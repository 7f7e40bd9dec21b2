#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace guirec {

// Root of every error thrown by the library. The CLI maps each subclass to
// its own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value violates a documented domain invariant (empty field, bad range).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed text input; `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Cross-file consistency failure, e.g. a session references an unknown action ID.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration or flag combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-finite parameters or another numerical breakdown during training.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace guirec
