#pragma once

#include <stdexcept>
#include <string>

namespace twistring {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector lengths disagree with the lattice size.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A configuration the requested operation is not defined for.
class UnsupportedConfiguration : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class SingularJacobian : public Error {
 public:
  SingularJacobian(int iteration, const std::string& what)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

class EigenSolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace twistring
