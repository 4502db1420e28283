#pragma once

#include <stdexcept>
#include <string>

namespace astgcn {

enum class ErrorCode {
  io_error = 1,
  empty_file,
  ragged_rows,
  non_numeric_cell,
  non_square,
  asymmetric,
  negative_entry,
  dimension_mismatch,
  shape_mismatch,
  tape_mismatch,
  degenerate_split,
  unknown_category,
  node_count_mismatch,
  length_mismatch,
  index_out_of_range,
  non_finite_activation,
  divergence_detected,
  zero_variance,
  config_error,
  checkpoint_error,
  invalid_argument,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace astgcn
