#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sockkt {

/// Malformed expression text. `offset` is the byte offset into the input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Domain violation while evaluating an expression (log of a non-positive
/// value, division by zero, non-finite result, ...).
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Derivative requested at a point where the function has a kink.
class NondifferentiableError : public EvalError {
 public:
  using EvalError::EvalError;
};

/// Simplex breakdown: tiny pivot, pivot limit, or an LP whose optimum
/// violates an invariant it must satisfy.
class LpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A second-order directional derivative required by a computation did not
/// converge.
class MissingDerivativeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid problem file or command-line input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sockkt
