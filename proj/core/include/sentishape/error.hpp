#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sshape {

// Base of every error raised by the library. Callers that only care about
// "something went wrong" catch this; the subclasses carry the category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration value (out-of-range size, alpha <= 0, bad flag).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// API misuse: stepping a finished episode, shape mismatch, bad id.
class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed persisted data. `line()` is 1-based, 0 when not line-oriented.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Fitting a model on unusable data (empty corpus, single class).
class TrainingError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss or gradient during learning.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A correlation whose value is undefined for the input (zero variance,
// single class present).
class UndefinedCorrelation : public Error {
 public:
  using Error::Error;
};

// The external scorer could not be reached or did not answer in time.
class ScorerUnavailable : public Error {
 public:
  using Error::Error;
};

// The external scorer answered, but the answer violates the wire protocol
// (id mismatch, polarity out of range, oversize line) or reports an error.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace sshape
