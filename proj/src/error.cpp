#include "pcit/error.hpp"

namespace pcit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::degenerate_spread: return "degenerate-spread";
    case ErrorCode::degenerate_weights: return "degenerate-weights";
    case ErrorCode::degenerate_variance: return "degenerate-variance";
    case ErrorCode::budget_exceeded: return "budget-exceeded";
    case ErrorCode::missing_column: return "missing-column";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace pcit
