#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oee {

enum class ErrorCode {
  InvalidStateSet,
  InvalidParameter,
  ConflictingAssignment,
  InvalidRegime,
  NotActual,
  UnsupportedStateSet,
  IndexOutOfRange,
  InvalidRule,
  UnknownRule,
  UnknownSchema,
  NoSchema,
  TickRegression,
  CorruptLog,
  InsufficientSamples,
  DegenerateTail,
  SeriesTooShort,
  InvalidConfig,
  ParseError,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace oee
