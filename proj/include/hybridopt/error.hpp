#pragma once

#include <stdexcept>
#include <string>

namespace hybridopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid space, config, or argument.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An objective evaluation failed (external command error, timeout, bad output).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// A serialized payload could not be decoded.
class SerializationError : public Error {
 public:
  using Error::Error;
};

}  // namespace hybridopt
