#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pcit {

enum class ErrorCode {
  invalid_argument,
  degenerate_spread,
  degenerate_weights,
  degenerate_variance,
  budget_exceeded,
  missing_column,
  parse_error,
  io_error,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// callers (and the CLI exit path) can tell precondition violations apart from
// numerically degenerate inputs.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace pcit
