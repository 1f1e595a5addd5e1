#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smolgs {

enum class ErrorCode {
  kEmptyCloud,
  kOutOfBounds,
  kInvalidCode,
  kCorruptStream,
  kEmptyAlphabet,
  kUnknownSymbol,
  kModelMismatch,
  kInvalidValue,
  kShapeError,
  kDegenerateView,
  kNoModel,
  kBadMagic,
  kUnsupportedVersion,
  kCrcMismatch,
  kLimitExceeded,
  kInvalidConfig,
  kParseError,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (notably the CLI) can map them to stable exit statuses.
class CodecError : public std::runtime_error {
 public:
  CodecError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw CodecError(code, message);
}

}  // namespace smolgs
