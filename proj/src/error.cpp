#include "projumb/error.hpp"

namespace projumb {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::degree_overflow: return "degree-overflow";
    case ErrorCode::invalid_transform: return "invalid-transform";
    case ErrorCode::chart_failure: return "chart-failure";
    case ErrorCode::degenerate_point: return "degenerate-point";
    case ErrorCode::label_failure: return "label-failure";
    case ErrorCode::not_adapted: return "not-adapted";
    case ErrorCode::indeterminate: return "indeterminate";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::normalization: return "normalization";
    case ErrorCode::not_a_node: return "not-a-node";
    case ErrorCode::non_generic: return "non-generic";
    case ErrorCode::refinement: return "refinement";
    case ErrorCode::biflecnode_degenerate: return "biflecnode-degenerate";
    case ErrorCode::degenerate_index: return "degenerate-index";
    case ErrorCode::coverage: return "coverage";
    case ErrorCode::parse: return "parse";
    case ErrorCode::invalid_argument: return "invalid-argument";
  }
  return "unknown";
}

}  // namespace projumb
