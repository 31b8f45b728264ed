#pragma once

#include <stdexcept>
#include <string>

namespace cve {

// Base class for every error the toolkit raises on bad input. `code()` is a
// stable machine-readable tag used in the CLI's error record.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

// A precondition on an argument was violated (empty corpus, k < 0, ...).
class InvalidArgument : public Error {
public:
  explicit InvalidArgument(const std::string& what) : Error("invalid_argument", what) {}
};

// A file or serialized artifact is malformed.
class FormatError : public Error {
public:
  explicit FormatError(const std::string& what) : Error("format_error", what) {}
};

// Text could not be encoded (byte not in vocabulary without byte fallback).
class EncodeError : public Error {
public:
  explicit EncodeError(const std::string& what) : Error("encode_error", what) {}
};

// Filesystem failures.
class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error("io_error", what) {}
};

// Broken internal invariant; indicates a bug rather than bad input.
class InternalError : public Error {
public:
  explicit InternalError(const std::string& what) : Error("internal_error", what) {}
};

}  // namespace cve
