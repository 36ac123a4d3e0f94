#pragma once

#include <stdexcept>
#include <string>

namespace fracharm {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument or input field violates an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// An iterative solver hit its cap before reaching the requested tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracharm
