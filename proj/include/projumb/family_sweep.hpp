#pragma once

// Node tracking across a 1-parameter family f_t, transition detection and
// index-sum bookkeeping per domain component.

#include <optional>
#include <string>
#include <vector>

#include "projumb/curve_tracing.hpp"
#include "projumb/jets.hpp"
#include "projumb/nodes.hpp"

namespace projumb {

struct SweepOptions {
  Window window;
  int grid = 128;
  double t0 = 0.0, t1 = 1.0;
  int steps = 11;
  bool hyperbonodes = true;
  bool ellipnodes = true;
  Tolerances tol;
};

inline constexpr int kMaxSteps = 100000;
inline constexpr int kMaxLocalizeEvaluations = 20;

struct ComponentSummary {
  int id = 0;
  PointKind kind = PointKind::elliptic;
  bool touches_boundary = false;
  std::optional<int> euler_characteristic;
  int boundary_loops = 0;
  int n_hyperbonodes = 0;
  int index_sum = 0;
  int n_ellipnodes = 0;
  int sign_sum = 0;
  bool flagged = false;  // some node inside carries a degenerate flag
};

/// Structural proxy for the topological type of the hyperbolic domain.
struct TopologySignature {
  struct Part {
    PointKind kind;
    bool touches_boundary;
    int euler;  // pixel Euler characteristic
    int boundary_loops;
    auto operator<=>(const Part&) const = default;
  };
  std::vector<Part> parts;  // sorted
  int parabolic_polylines = 0;
  bool operator==(const TopologySignature&) const = default;
};

struct SweepSample {
  double t = 0.0;
  std::vector<NodeRecord> hyperbonodes;
  std::vector<NodeRecord> ellipnodes;
  std::vector<int> hyperbonode_component;  // component id per node
  std::vector<int> ellipnode_component;
  std::vector<ComponentSummary> components;
  TopologySignature topology;
  int discarded_seeds = 0;
};

enum class TransitionKind { creation_annihilation, flec_hyperbonode, double_ellipnode, topology_change };
const char* to_string(TransitionKind kind) noexcept;

struct Transition {
  TransitionKind kind = TransitionKind::creation_annihilation;
  int sample_lo = 0, sample_hi = 0;  // bracketing samples
  double t_lo = 0.0, t_hi = 0.0;     // after localization
  Point2 location;
  bool localized = false;
  bool flagged = false;  // a degenerate flag was seen inside the bracket
  std::optional<bool> contract_ok;
  std::string note;
};

/// Node matching between consecutive samples: match[k][i] is the index in
/// sample k+1 of hyperbonode i of sample k, or -1.
struct Matching {
  std::vector<std::vector<int>> hyperbonodes;
  std::vector<std::vector<int>> ellipnodes;
};

struct SweepReport {
  SweepOptions options;
  std::vector<SweepSample> samples;
  Matching matching;
  std::vector<Transition> transitions;
  std::vector<std::string> contract_failures;
};

/// Throws invalid_argument for steps outside [2, 1e5] or a bad grid/window.
SweepReport sweep(const FamilyJet& family, const SweepOptions& options);

/// Checks the per-transition contracts and stores the verdicts in the
/// report; returns the transitions.
std::vector<Transition> detect_transitions(SweepReport& report);

struct IndexSumSeries {
  std::vector<int> sums;             // per sample
  std::vector<bool> touches_boundary;
  std::vector<int> uncovered_changes;  // k where sums[k] != sums[k+1] with no topology change
};

/// Index sum (hyperbolic component) or sign sum (elliptic component) per
/// sample. Throws coverage when the component is missing at some sample.
IndexSumSeries index_sum(const SweepReport& report, int component_id);

/// Sample grid t_k.
std::vector<double> sample_parameters(double t0, double t1, int steps);

}  // namespace projumb
