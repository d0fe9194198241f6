#pragma once

// Pointwise classification, asymptotic directions and the left/right label
// of the asymptotic foliations.

#include <array>
#include <complex>

#include "projumb/geometry.hpp"
#include "projumb/jets.hpp"

namespace projumb {

/// Numerical tolerances shared by every module. `--tol-scale` multiplies
/// all of them uniformly.
struct Tolerances {
  double parab_rel = 1e-9;  // times the squared scale of the second-order partials
  double root = 1e-10;
  double frame = 1e-8;
  double label_rel = 1e-2;  // offset arc length as a fraction of the domain diameter
  double curve = 1e-10;
  double node = 1e-10;
  double diameter = 1.0;

  Tolerances scaled(double k) const;
  Tolerances with_diameter(double d) const {
    Tolerances t = *this;
    t.diameter = d;
    return t;
  }
  double label_delta() const { return label_rel * diameter; }
  double parabolic(const JetSample& s) const;
};

enum class PointKind { elliptic, hyperbolic, borderline };
const char* to_string(PointKind kind) noexcept;

struct PointClass {
  PointKind kind = PointKind::borderline;
  double discriminant = 0.0;  // f11^2 - f20 f02
};

PointClass classify_point(const MongeJet& jet, double x, double y, const Tolerances& tol = {});
PointClass classify_sample(const JetSample& s, const Tolerances& tol = {});

enum class Label { unknown, left, right };
const char* to_string(Label label) noexcept;

/// Tangent direction stored as a slope p = dy/dx, or as the dual slope
/// q = dx/dy when `dual` is set (used when |p| > 1).
struct Direction {
  double slope = 0.0;
  bool dual = false;

  Vec2 unit() const;
  /// p = dy/dx; infinite for the vertical direction.
  double primal_slope() const;
  static Direction from_vector(Vec2 v);
};

struct AsymptoticFrame {
  Point2 point;
  PointKind kind = PointKind::borderline;
  double discriminant = 0.0;
  int count = 0;  // 2 at hyperbolic points, 0 at elliptic points
  std::array<Direction, 2> directions{};
  std::array<Label, 2> labels{Label::unknown, Label::unknown};
  std::complex<double> complex_slope{};  // root of a^f with Im > 0 (elliptic)

  /// Position of the direction carrying `label`, or -1.
  int find(Label label) const noexcept;
};

/// Unnormalized real asymptotic vectors at a hyperbolic sample, computed
/// with the cancellation-free root formula.
std::array<Vec2, 2> asymptotic_vectors(const JetSample& s);

AsymptoticFrame asymptotic_directions(const MongeJet& jet, double x, double y,
                                      const Tolerances& tol = {});
AsymptoticFrame asymptotic_directions(const JetSample& s, Point2 at, const Tolerances& tol = {});

/// det(g', g'', g''') of the asymptotic curve through the sample point in the
/// given direction, parametrized by x (or by y for dual directions and then
/// sign-corrected so that the value is parametrization independent).
double frame_determinant(const JetSample& s, Point2 at, Direction d);

AsymptoticFrame left_right_label(const MongeJet& jet, const AsymptoticFrame& frame,
                                 const Tolerances& tol = {});

/// Label of a single direction; throws label_failure when undecidable.
Label label_direction(const MongeJet& jet, Point2 at, Direction d, const Tolerances& tol = {});

/// Unit direction field of the asymptotic foliation closest to `reference`,
/// oriented along it. Throws degenerate_point away from the hyperbolic domain.
Vec2 follow_direction(const JetSample& s, Vec2 reference, const Tolerances& tol = {});

enum class ChartMode { axes, diagonals };

struct AdaptedChart {
  MongeJet jet;
  Mat2 basis;  // old offset = basis * new coordinates
  double z_scale = 1.0;
};

AdaptedChart adapted_chart(const MongeJet& jet, double x, double y, ChartMode mode,
                           const Tolerances& tol = {});

}  // namespace projumb
