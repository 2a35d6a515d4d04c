#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace linconn {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset()` is the 1-based byte position of the
/// offending character (one past the end for premature end of input).
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnboundVariable : public Error {
 public:
  explicit UnboundVariable(const std::string& name)
      : Error("unbound variable " + name), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Evaluation left the domain of a primitive (log/sqrt of a negative,
/// division by zero, non-differentiable point of abs).
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A tangent vector expected to be vertical for pi is not.
class NotVertical : public Error {
 public:
  using Error::Error;
};

/// A second tangent vector expected to be vertical for T(pi) is not.
class NotTpiVertical : public Error {
 public:
  using Error::Error;
};

/// Two base points that must coincide do not.
class BaseMismatch : public Error {
 public:
  using Error::Error;
};

/// A point violates the domain predicate of the bundle.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class NotProjectable : public Error {
 public:
  using Error::Error;
};

/// Spec-file problem; `line()` is 1-based, 0 when not tied to a line.
class SpecError : public Error {
 public:
  SpecError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace linconn
