#pragma once

#include <stdexcept>
#include <string>

namespace driftcurate {

enum class ErrorCode {
  missing_file,
  malformed_header,
  truncated_payload,
  bad_magic,
  unsupported_version,
  dim_overflow,
  zero_dim,
  io_failure,
  malformed_json,
  duplicate_id,
  range_error,
  degenerate_dims,
  degenerate_input,
  one_sided_data,
  unscorable_image,
  model_dimension_mismatch,
  too_few_rows,
  too_many_levels,
  dim_mismatch,
  no_positives,
  missing_prediction,
  missing_score,
  missing_dice,
  fraction_infeasible,
  empty_input,
  map_too_small,
  single_class,
  length_mismatch,
  degenerate,
  invalid_argument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace driftcurate
