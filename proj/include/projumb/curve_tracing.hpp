#pragma once

// Parabolic and left/right flecnodal curves over a rectangle as polylines,
// plus the sign-constant components of the window minus the parabolic curve.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "projumb/geometry.hpp"
#include "projumb/jets.hpp"
#include "projumb/local_geometry.hpp"

namespace projumb {

enum class CurveKind { parabolic, flecnodal_left, flecnodal_right };
const char* to_string(CurveKind kind) noexcept;

inline constexpr int kMinGrid = 16;
inline constexpr int kMaxGrid = 4096;

struct CurveVertex {
  Point2 pos;
  Direction slope;          // asymptotic direction (flecnodal curves)
  std::int64_t edge = -1;   // grid edge the vertex was found on
};

struct Polyline {
  std::vector<CurveVertex> vertices;
  bool closed = false;
};

struct TracedCurve {
  CurveKind kind = CurveKind::parabolic;
  Window window;
  int grid = 0;
  std::vector<Polyline> segments;
  double refinement_residual = 0.0;  // max over vertices of the defining residuals
  int gaps = 0;            // skipped cells next to the parabolic curve
  int label_failures = 0;  // vertices whose offset label disagrees with the sheet
  int dropped = 0;         // crossings whose refinement failed
  bool degenerate = false; // the flecnodal function vanishes on the whole window

  std::size_t vertex_count() const;
  /// Cells (row-major index) crossed by the curve.
  std::vector<std::int64_t> cells() const;
};

/// Residuals (|a|, |I|) of a flecnodal vertex in the chart of its slope.
std::pair<double, double> flecnodal_residual(const JetSample& s, Direction d);

TracedCurve trace_parabolic(const MongeJet& jet, const Window& window, int grid,
                            const Tolerances& tol = {});

/// Returns {left, right}.
std::pair<TracedCurve, TracedCurve> trace_flecnodal(const MongeJet& jet, const Window& window,
                                                    int grid, const Tolerances& tol = {});

struct DomainComponent {
  int id = 0;
  PointKind kind = PointKind::elliptic;  // hyperbolic or elliptic
  bool touches_boundary = false;
  int pixels = 0;
  std::optional<int> euler_characteristic;  // interior components only
  int pixel_euler = 0;                      // V - E + F of the pixel complex
  int boundary_loops = 0;                   // closed parabolic polylines bounding it
  Point2 sample;                            // a grid vertex inside
};

struct ComponentMap {
  Window window;
  int grid = 0;
  std::vector<int> label;  // per grid vertex, row-major (grid+1)^2
  std::vector<DomainComponent> components;

  /// Component of the grid vertex nearest to p; -1 outside the window.
  int component_at(Point2 p) const;
};

/// Partition of the window by the sign of f11^2 - f20 f02 on the grid of
/// `parabolic`. Components are numbered in raster order of their first vertex.
ComponentMap components(const MongeJet& jet, const Window& window, const TracedCurve& parabolic);

/// Two-sided Hausdorff distance between the vertex sets of two curves.
double hausdorff_distance(const TracedCurve& a, const TracedCurve& b);

}  // namespace projumb
