#pragma once

#include <stdexcept>
#include <string>

namespace uol {

// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violations (bad config values, dimension mismatches, ...).
class InvalidArgument final : public Error {
 public:
  using Error::Error;
};

// Filesystem / stream failures.
class IoError final : public Error {
 public:
  using Error::Error;
};

// Malformed input that could not be decoded. `line` is 1-based when the
// source is line oriented, 0 otherwise.
class ParseError final : public Error {
 public:
  explicit ParseError(const std::string& msg, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_ = 0;
};

// Well-formed input whose values break a documented invariant.
class ValidationError final : public Error {
 public:
  explicit ValidationError(const std::string& msg, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_ = 0;
};

// API misuse that the library can detect (e.g. a stale backward cache).
class ContractViolation final : public Error {
 public:
  using Error::Error;
};

// Persistence container written by an incompatible library version.
class UnsupportedVersion final : public Error {
 public:
  using Error::Error;
};

}  // namespace uol
