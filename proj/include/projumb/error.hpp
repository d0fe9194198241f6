#pragma once

#include <stdexcept>
#include <string>

namespace projumb {

/// Failure categories raised by the numerical core. The C API maps these
/// one-to-one onto `pu_status` codes.
enum class ErrorCode {
  degree_overflow = 1,
  invalid_transform,
  chart_failure,
  degenerate_point,
  label_failure,
  not_adapted,
  indeterminate,
  precondition,
  normalization,
  not_a_node,
  non_generic,
  refinement,
  biflecnode_degenerate,
  degenerate_index,
  coverage,
  parse,
  invalid_argument,
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

}  // namespace projumb
