#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lingcast {

enum class ErrorKind {
  InvalidArgument,
  InvalidLevels,
  DegenerateRange,
  InsufficientPoints,
  UndefinedCorrelation,
  SeriesTooShort,
  NoValidCandidate,
  WindowTooSmall,
  FileNotFound,
  ParseError,
  EmptyInput,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidLevels: return "InvalidLevels";
    case ErrorKind::DegenerateRange: return "DegenerateRange";
    case ErrorKind::InsufficientPoints: return "InsufficientPoints";
    case ErrorKind::UndefinedCorrelation: return "UndefinedCorrelation";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::NoValidCandidate: return "NoValidCandidate";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptyInput: return "EmptyInput";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when a series cannot host a single admissible candidate window.
class SeriesTooShortError : public Error {
 public:
  SeriesTooShortError(std::size_t have, std::size_t need)
      : Error(ErrorKind::SeriesTooShort,
              "series has " + std::to_string(have) + " values, minimum length is " +
                  std::to_string(need)),
        have_(have),
        need_(need) {}

  std::size_t length() const noexcept { return have_; }
  std::size_t minimum_length() const noexcept { return need_; }

 private:
  std::size_t have_;
  std::size_t need_;
};

}  // namespace lingcast
