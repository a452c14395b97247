#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aqls {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pauli-expression syntax error, annotated with the byte offset in the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Matrix is singular (or numerically indistinguishable from singular).
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Eigendecomposition failed to converge or to meet its accuracy contract.
class EigenSolverError : public Error {
 public:
  using Error::Error;
};

/// The null space of a Hamiltonian does not have the expected dimension.
class NullityError : public Error {
 public:
  using Error::Error;
};

/// Post-selection hit an (almost) zero-probability outcome.
class PostselectError : public Error {
 public:
  using Error::Error;
};

/// Config-file schema violation; message carries the offending field path.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace aqls
