#pragma once

#include <stdexcept>
#include <string>

namespace lwvc {

enum class ErrorKind {
  Format,       // malformed container or header
  Truncation,   // payload ends early
  Unsupported,  // valid but not handled (chroma format, stream version)
  Config,       // inconsistent codec / quantizer configuration
  Argument,     // caller passed an out-of-range value
  Consistency,  // internal shapes disagree with recorded metadata
  LevelOverflow,
  Plan,         // GOP planning failure
  Corruption,   // entropy payload or unit table does not decode
  Domain,       // numerically undefined request (e.g. no RD overlap)
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace lwvc
