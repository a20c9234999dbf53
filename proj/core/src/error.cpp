#include "sdm/error.hpp"

namespace sdm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::invalid_bandwidth: return "invalid_bandwidth";
    case ErrorCode::missing_file: return "missing_file";
    case ErrorCode::schema_mismatch: return "schema_mismatch";
    case ErrorCode::rank_deficient: return "rank_deficient";
    case ErrorCode::empty_buffer: return "empty_buffer";
    case ErrorCode::duplicate_points: return "duplicate_points";
    case ErrorCode::unfitted_model: return "unfitted_model";
    case ErrorCode::format_version: return "format_version";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::io: return "io";
    case ErrorCode::out_of_domain: return "out_of_domain";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace sdm
