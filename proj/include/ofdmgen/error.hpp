#pragma once

#include <stdexcept>
#include <string>

namespace ofdmgen {

/// Error categories reported by the library. The CLI forwards the code string
/// in its machine-readable error output.
enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  format,
  io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ofdmgen
