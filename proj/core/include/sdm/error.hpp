#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sdm {

// Error categories. The numeric values double as CLI exit codes.
enum class ErrorCode : int {
  invalid_argument = 2,
  invalid_bandwidth = 3,
  missing_file = 4,
  schema_mismatch = 5,
  rank_deficient = 6,
  empty_buffer = 7,
  duplicate_points = 8,
  unfitted_model = 9,
  format_version = 10,
  unsupported = 11,
  numerical = 12,
  io = 13,
  out_of_domain = 14,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace sdm
