#pragma once

#include <stdexcept>
#include <string>

namespace bayaaz {

enum class ErrorKind {
  io,
  encoding,
  empty_input,
  shape,
  vocab,
  length,
  consistency,
  insufficient_data,
  format,
  version,
  corruption,
  choice,
  session,
  structure,
  scansion,
  config,
};

// Every failure raised by the library carries a kind so callers (the CLI and
// the HTTP service) can map it onto their own taxonomy.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::encoding: return "encoding";
    case ErrorKind::empty_input: return "empty_input";
    case ErrorKind::shape: return "shape";
    case ErrorKind::vocab: return "vocab";
    case ErrorKind::length: return "length";
    case ErrorKind::consistency: return "consistency";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::format: return "format";
    case ErrorKind::version: return "version";
    case ErrorKind::corruption: return "corruption";
    case ErrorKind::choice: return "choice";
    case ErrorKind::session: return "session";
    case ErrorKind::structure: return "structure";
    case ErrorKind::scansion: return "scansion";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

}  // namespace bayaaz
