#pragma once

#include <stdexcept>
#include <string>

namespace toral {

// Categories map one-to-one onto the CLI exit codes.
enum class ErrorKind {
  Usage = 1,         // malformed input, bad arguments
  Precondition = 2,  // input violates an operation's hypotheses
  Numerical = 3,     // a numerical procedure failed to converge or certify
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error(ErrorKind::Precondition, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::Numerical, what) {}
};

}  // namespace toral
