#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace micol {

/// Base class for every error raised by the library. The CLI maps the
/// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data or configuration (exit code 1).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A JSON/JSONL line that cannot be parsed.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : ValidationError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Unknown document or label id.
class LookupError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A caller broke a documented precondition (e.g. asking whether a document
/// reaches itself).
class PreconditionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Pair sampling cannot produce the requested pairs.
class SamplingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Checkpoint is truncated, corrupt, from another format version or built
/// for a different vocabulary.
class CheckpointError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Filesystem failure (exit code 2).
class IoError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant was violated (exit code 3).
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace micol
