#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pforge {

enum class ErrorCode {
  Io,
  EmptyInput,
  EmptyCorpus,
  EmptyModel,
  MissingAttributes,
  UnknownCountry,
  UnsupportedVersion,
  DecodeError,
  InsufficientData,
  PoolExhausted,
  InvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

// Every recoverable failure in the library surfaces as this exception; the
// code is the stable, machine-readable part and what() carries details.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pforge
