#pragma once

#include <stdexcept>
#include <string>

namespace heckepair {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// An enumeration or finite quotient would exceed its configured cap.
class SizeCapError : public Error {
 public:
  using Error::Error;
};

/// The determinant vanishes modulo p^k, so no factorization exists at that depth.
class RegularityError : public Error {
 public:
  using Error::Error;
};

/// A finite-level adelic point does not determine the requested action.
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

class AdjointLeavesSemigroupError : public Error {
 public:
  using Error::Error;
};

/// A lattice or element lies outside the interior of a truncation window.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// A bound is requested where the majorants in use do not apply.
class CertificationError : public Error {
 public:
  using Error::Error;
};

class NotHomogeneousError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace heckepair
