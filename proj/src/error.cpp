#include "diarkit/error.hpp"

#include <string>

namespace diarkit {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NotWav: return "NotWav";
    case Errc::UnsupportedEncoding: return "UnsupportedEncoding";
    case Errc::TruncatedFile: return "TruncatedFile";
    case Errc::Io: return "Io";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::RateMismatch: return "RateMismatch";
    case Errc::DegenerateFilter: return "DegenerateFilter";
    case Errc::TooShort: return "TooShort";
    case Errc::BadLevel: return "BadLevel";
    case Errc::ParseError: return "ParseError";
    case Errc::BadParams: return "BadParams";
    case Errc::EmptySubsegment: return "EmptySubsegment";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::MissingEntry: return "MissingEntry";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::BadK: return "BadK";
    case Errc::EmptyReference: return "EmptyReference";
    case Errc::FileSetMismatch: return "FileSetMismatch";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

ParseError::ParseError(std::size_t line, const std::string& reason)
    : Error(Errc::ParseError,
            line > 0 ? "line " + std::to_string(line) + ": " + reason : reason),
      line_(line),
      reason_(reason) {}

RateMismatch::RateMismatch(int actual, int expected)
    : Error(Errc::RateMismatch, "sample rate " + std::to_string(actual) + " Hz, expected " +
                                    std::to_string(expected) + " Hz (no resampling is done)"),
      actual_(actual),
      expected_(expected) {}

}  // namespace diarkit
