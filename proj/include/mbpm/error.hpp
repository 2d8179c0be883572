#pragma once

#include <stdexcept>
#include <string>

namespace mbpm {

// Base for every error raised by the library. The C API maps each subclass
// onto one status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent model description. The message starts with the
// offending field path, e.g. "migration[1].q: probability out of range".
class SpecError : public Error {
 public:
  using Error::Error;
};

class NotPrimitiveError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// The requested computation does not apply to this model (e.g. a limit law
// requested outside its parameter regime).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// A documented precondition on an argument does not hold.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace mbpm
