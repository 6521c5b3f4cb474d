#include "pforge/error.hpp"

namespace pforge {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return "IO_ERROR";
    case ErrorCode::EmptyInput: return "EMPTY_INPUT";
    case ErrorCode::EmptyCorpus: return "EMPTY_CORPUS";
    case ErrorCode::EmptyModel: return "EMPTY_MODEL";
    case ErrorCode::MissingAttributes: return "MISSING_ATTRIBUTES";
    case ErrorCode::UnknownCountry: return "UNKNOWN_COUNTRY";
    case ErrorCode::UnsupportedVersion: return "UNSUPPORTED_VERSION";
    case ErrorCode::DecodeError: return "DECODE_ERROR";
    case ErrorCode::InsufficientData: return "INSUFFICIENT_DATA";
    case ErrorCode::PoolExhausted: return "POOL_EXHAUSTED";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
  }
  return "UNKNOWN";
}

}  // namespace pforge
