#include "camel/error.hpp"

namespace camel {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::degenerate_class: return "degenerate-class";
    case ErrorCode::missing_supervision: return "missing-supervision";
    case ErrorCode::numerical_failure: return "numerical-failure";
    case ErrorCode::validation: return "validation";
    case ErrorCode::undefined_metric: return "undefined-metric";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::schema_mismatch: return "schema-mismatch";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace camel
