#pragma once

// Builtin verification suite: the invariance statements checked at desk
// scale with the library's own independent code paths (closed formulas
// against cross-ratios, axes against diagonal charts, sweeps against the
// local node classification).

#include <functional>
#include <string>
#include <vector>

namespace projumb {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs every criterion in order; `on_result` sees each one as it finishes.
std::vector<CriterionResult> verify_builtin(
    const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace projumb
