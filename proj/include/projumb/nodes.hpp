#pragma once

// Hyperbonodes (crossings of the left and right flecnodal curves) and
// ellipnodes (zeros of the complex flecnodal function) as isolated points.

#include <string>
#include <vector>

#include "projumb/curve_tracing.hpp"
#include "projumb/geometry.hpp"
#include "projumb/jets.hpp"
#include "projumb/local_geometry.hpp"

namespace projumb {

enum class NodeKind { hyperbonode, ellipnode };
const char* to_string(NodeKind kind) noexcept;

struct NodeFlags {
  bool double_node = false;       // rho near 0
  bool flec_hyperbonode = false;  // |rho| near infinity
  bool non_generic = false;       // invariant could not be evaluated

  bool any() const { return double_node || flec_hyperbonode || non_generic; }
};

struct NodeRecord {
  NodeKind kind = NodeKind::hyperbonode;
  Point2 position;
  ExtendedReal rho;
  int parity = 0;  // hyperbonodes; 0 when undefined (biflecnodal)
  int index = 0;
  double residual = 0.0;
  NodeFlags flags;
  int iterations = 0;
};

/// Seeds that did not survive refinement.
struct NodeReport {
  int seeds = 0;
  int discarded = 0;
  std::vector<std::string> notes;
};

std::vector<NodeRecord> find_hyperbonodes(const MongeJet& jet, const Window& window, int grid,
                                          const Tolerances& tol = {}, NodeReport* report = nullptr);

std::vector<NodeRecord> find_ellipnodes(const MongeJet& jet, const Window& window, int grid,
                                        const Tolerances& tol = {}, NodeReport* report = nullptr);

/// Newton polish of one seed; throws refinement on divergence, bad
/// conditioning or a seed of the wrong type.
NodeRecord refine_node(const MongeJet& jet, Point2 seed, NodeKind kind, const Tolerances& tol = {});

/// Fills rho, parity, index and flags of a refined node.
void populate_invariants(const MongeJet& jet, NodeRecord& node, const Tolerances& tol = {});

/// Deduplication radius for a window.
double dedup_radius(const Window& window, const Tolerances& tol = {});

}  // namespace projumb
