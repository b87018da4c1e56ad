#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace diarkit {

enum class Errc {
  NotWav,
  UnsupportedEncoding,
  TruncatedFile,
  Io,
  EmptyInput,
  LengthMismatch,
  RateMismatch,
  DegenerateFilter,
  TooShort,
  BadLevel,
  ParseError,
  BadParams,
  EmptySubsegment,
  DimensionMismatch,
  MissingEntry,
  ZeroVector,
  NoConvergence,
  BadK,
  EmptyReference,
  FileSetMismatch,
};

const char* to_string(Errc code) noexcept;

/// Base exception for every failure raised by the library. `code()` names
/// the failure class so callers can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Text-format failure with the 1-based line it occurred on (0 when the
/// failure is not tied to a line, e.g. a missing header).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason);

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class RateMismatch : public Error {
 public:
  RateMismatch(int actual, int expected);

  int actual() const noexcept { return actual_; }
  int expected() const noexcept { return expected_; }

 private:
  int actual_;
  int expected_;
};

}  // namespace diarkit
