#pragma once

#include <stdexcept>
#include <string>

namespace supbridge {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scalar argument is outside its documented range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Singular linear maps, non-unit directions and similar construction failures.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// A curve fails its structural invariants (closure, matching endpoints, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// An operation would produce a self-intersecting curve.
class TopologyError : public Error {
 public:
  using Error::Error;
};

/// A LambdaPair violates one of its three admissibility conditions.
class AdmissibilityError : public Error {
 public:
  AdmissibilityError(std::string condition, const std::string& what)
      : Error(what), condition_(std::move(condition)) {}

  /// One of "in-torus", "as-eta", "like-eta".
  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

/// Projection is constant or otherwise too degenerate to count.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Root bracketing or a sweep failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace supbridge
