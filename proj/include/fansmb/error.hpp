#pragma once

#include <stdexcept>
#include <string>

namespace fansmb {

// Base for every error raised by the library. The CLI maps the three
// families below onto exit codes 1, 2 and 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments, out-of-range indices, malformed configuration.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Singular matrices, non-finite losses, failed factorizations.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(const std::string& what, int pivot)
      : NumericalError(what + " (failing pivot " + std::to_string(pivot) + ")"),
        pivot_(pivot) {}
  int pivot() const { return pivot_; }

 private:
  int pivot_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fansmb
