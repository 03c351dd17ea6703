#include "oee/error.hpp"

#include <string>

namespace oee {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidStateSet: return "InvalidStateSet";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::ConflictingAssignment: return "ConflictingAssignment";
    case ErrorCode::InvalidRegime: return "InvalidRegime";
    case ErrorCode::NotActual: return "NotActual";
    case ErrorCode::UnsupportedStateSet: return "UnsupportedStateSet";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidRule: return "InvalidRule";
    case ErrorCode::UnknownRule: return "UnknownRule";
    case ErrorCode::UnknownSchema: return "UnknownSchema";
    case ErrorCode::NoSchema: return "NoSchema";
    case ErrorCode::TickRegression: return "TickRegression";
    case ErrorCode::CorruptLog: return "CorruptLog";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::DegenerateTail: return "DegenerateTail";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace oee
