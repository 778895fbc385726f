#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace camel {

enum class ErrorCode {
  invalid_argument,
  degenerate_class,
  missing_supervision,
  numerical_failure,
  validation,
  undefined_metric,
  parse_error,
  schema_mismatch,
  io_error,
};

/// Stable, machine-readable name of an error code ("degenerate-class", ...).
std::string_view to_string(ErrorCode code);

/// The single exception type thrown by the library. Callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace camel
