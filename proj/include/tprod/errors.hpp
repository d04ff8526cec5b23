#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tprod {

// Base for every error raised by the library. Callers that only care about
// "something went wrong in tprod" catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible dimensions (inner sizes, slice counts, non-square slices).
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A function was evaluated outside of its domain (log of a non-positive
// eigenvalue, fractional power of a negative one, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Out-of-range or inconsistent user parameter.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Input violates an operation precondition (symmetry, orthogonality, TPD).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: non-convergence, non-finite results.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Request exceeds a configured resource budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Malformed input document. `pointer` is the JSON pointer of the offending
// field ("" for the document root), `source` the file path when known.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& msg, std::string pointer, std::string source = {})
      : Error(compose(msg, pointer, source)), pointer_(std::move(pointer)), source_(std::move(source)) {}

  const std::string& pointer() const noexcept { return pointer_; }
  const std::string& source() const noexcept { return source_; }

 private:
  static std::string compose(const std::string& msg, const std::string& pointer, const std::string& source) {
    std::string out = source.empty() ? std::string() : source + ": ";
    out += "at '" + (pointer.empty() ? std::string("/") : pointer) + "': " + msg;
    return out;
  }

  std::string pointer_;
  std::string source_;
};

}  // namespace tprod
