#pragma once

#include <stdexcept>
#include <string>

namespace qubus {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OpenPathError : public Error {
 public:
  using Error::Error;
};

class ZeroNormError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class NonUnitaryError : public Error {
 public:
  using Error::Error;
};

class CutoffTooSmall : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class InfeasibleParams : public Error {
 public:
  using Error::Error;
};

class DegenerateCoupling : public Error {
 public:
  using Error::Error;
};

class InvalidEta : public Error {
 public:
  using Error::Error;
};

class MissingInputRecord : public Error {
 public:
  using Error::Error;
};

/// Raised by the schedule solver; carries the best residual norm reached.
class NoSolutionFound : public Error {
 public:
  NoSolutionFound(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace qubus
