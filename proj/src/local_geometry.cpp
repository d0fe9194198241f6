#include "projumb/local_geometry.hpp"

#include <algorithm>
#include <cmath>

#include "projumb/error.hpp"

namespace projumb {

Tolerances Tolerances::scaled(double k) const {
  if (!(k > 0.0) || !std::isfinite(k))
    throw Error(ErrorCode::invalid_argument, "tolerance scale must be positive");
  Tolerances t = *this;
  t.parab_rel *= k;
  t.root *= k;
  t.frame *= k;
  t.label_rel *= k;
  t.curve *= k;
  t.node *= k;
  return t;
}

double Tolerances::parabolic(const JetSample& s) const {
  const double scale = std::max({std::abs(s(2, 0)), std::abs(s(1, 1)), std::abs(s(0, 2))});
  return parab_rel * scale * scale;
}

const char* to_string(PointKind kind) noexcept {
  switch (kind) {
    case PointKind::elliptic: return "elliptic";
    case PointKind::hyperbolic: return "hyperbolic";
    case PointKind::borderline: return "parabolic-borderline";
  }
  return "unknown";
}

const char* to_string(Label label) noexcept {
  switch (label) {
    case Label::left: return "left";
    case Label::right: return "right";
    case Label::unknown: return "unknown";
  }
  return "unknown";
}

PointClass classify_sample(const JetSample& s, const Tolerances& tol) {
  PointClass pc;
  pc.discriminant = s(1, 1) * s(1, 1) - s(2, 0) * s(0, 2);
  const double band = tol.parabolic(s);
  if (pc.discriminant > band)
    pc.kind = PointKind::hyperbolic;
  else if (pc.discriminant < -band)
    pc.kind = PointKind::elliptic;
  else
    pc.kind = PointKind::borderline;
  return pc;
}

PointClass classify_point(const MongeJet& jet, double x, double y, const Tolerances& tol) {
  return classify_sample(jet.sample(x, y), tol);
}

Vec2 Direction::unit() const {
  const Vec2 v = dual ? Vec2{slope, 1.0} : Vec2{1.0, slope};
  return (1.0 / norm(v)) * v;
}

double Direction::primal_slope() const {
  if (!dual) return slope;
  if (slope == 0.0) return INFINITY;
  return 1.0 / slope;
}

Direction Direction::from_vector(Vec2 v) {
  if (std::abs(v.x) >= std::abs(v.y)) return {v.y / v.x, false};
  return {v.x / v.y, true};
}

int AsymptoticFrame::find(Label label) const noexcept {
  for (int k = 0; k < count; ++k)
    if (labels[k] == label) return k;
  return -1;
}

std::array<Vec2, 2> asymptotic_vectors(const JetSample& s) {
  const double a = s(2, 0), b = s(1, 1), c = s(0, 2);
  const double disc = std::max(b * b - a * c, 0.0);
  const double r = b + std::copysign(std::sqrt(disc), b);
  return {Vec2{r, -a}, Vec2{c, -r}};
}

AsymptoticFrame asymptotic_directions(const JetSample& s, Point2 at, const Tolerances& tol) {
  AsymptoticFrame fr;
  fr.point = at;
  const PointClass pc = classify_sample(s, tol);
  fr.kind = pc.kind;
  fr.discriminant = pc.discriminant;
  if (pc.kind == PointKind::borderline)
    throw Error(ErrorCode::degenerate_point, "asymptotic directions requested at a parabolic point");
  if (pc.kind == PointKind::hyperbolic) {
    const auto vs = asymptotic_vectors(s);
    fr.count = 2;
    fr.directions = {Direction::from_vector(vs[0]), Direction::from_vector(vs[1])};
  } else {
    const double b = s(1, 1), c = s(0, 2);
    // Roots of f20 + 2 f11 p + f02 p^2; f02 != 0 at elliptic points.
    const double im = std::sqrt(-pc.discriminant) / std::abs(c);
    fr.complex_slope = {-b / c, im};
  }
  return fr;
}

AsymptoticFrame asymptotic_directions(const MongeJet& jet, double x, double y,
                                      const Tolerances& tol) {
  return asymptotic_directions(jet.sample(x, y), {x, y}, tol);
}

namespace {

// Derivatives of the asymptotic curve y(x), z(x) = f(x, y(x)) expressed in
// jet space: y'' is the slope field, the rest follow by total derivatives.
struct FrameExpressions {
  CompiledDiffPoly y2n, y2d, y3n, y3d, z2n, z2d, z3n, z3d;

  FrameExpressions() {
    const DiffPoly p = DiffPoly::p();
    const DiffPoly a = DiffPoly::f(2, 0) + 2.0 * DiffPoly::f(1, 1) * p + DiffPoly::f(0, 2) * p * p;
    const DiffRational field{DiffPoly() - (a.partial_x() + p * a.partial_y()), a.partial_p()};
    const DiffRational y3 = total_derivative(field, field);
    const DiffPoly z1 = DiffPoly::f(1, 0) + DiffPoly::f(0, 1) * p;
    const DiffRational z2 = total_derivative(z1, field);
    const DiffRational z3 = total_derivative(z2, field);
    y2n = CompiledDiffPoly(field.num);
    y2d = CompiledDiffPoly(field.den);
    y3n = CompiledDiffPoly(y3.num);
    y3d = CompiledDiffPoly(y3.den);
    z2n = CompiledDiffPoly(z2.num);
    z2d = CompiledDiffPoly(z2.den);
    z3n = CompiledDiffPoly(z3.num);
    z3d = CompiledDiffPoly(z3.den);
  }

  double det(const JetPoint& at) const {
    const double y2 = y2n.eval(at) / y2d.eval(at);
    const double y3 = y3n.eval(at) / y3d.eval(at);
    const double z2 = z2n.eval(at) / z2d.eval(at);
    const double z3 = z3n.eval(at) / z3d.eval(at);
    return y2 * z3 - y3 * z2;
  }
};

const FrameExpressions& frame_expressions() {
  static const FrameExpressions e;
  return e;
}

JetSample transpose_sample(const JetSample& s) {
  JetSample t;
  for (int d = 0; d <= kSampleOrder; ++d)
    for (int j = 0; j <= d; ++j) t.f[JetSample::index(d - j, j)] = s(j, d - j);
  return t;
}

// Unit asymptotic direction field closest to `reference`; rk4 along it.
Point2 integrate(const MongeJet& jet, Point2 start, Vec2& dir, double length, int steps,
                 const Tolerances& tol) {
  const double h = length / steps;
  Point2 q = start;
  for (int k = 0; k < steps; ++k) {
    const Vec2 k1 = follow_direction(jet.sample(q.x, q.y), dir, tol);
    const Point2 q2 = q + (0.5 * h) * k1;
    const Vec2 k2 = follow_direction(jet.sample(q2.x, q2.y), k1, tol);
    const Point2 q3 = q + (0.5 * h) * k2;
    const Vec2 k3 = follow_direction(jet.sample(q3.x, q3.y), k2, tol);
    const Point2 q4 = q + h * k3;
    const Vec2 k4 = follow_direction(jet.sample(q4.x, q4.y), k3, tol);
    q = q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    dir = k4;
  }
  dir = follow_direction(jet.sample(q.x, q.y), dir, tol);
  return q;
}

Label label_of(double det) { return det > 0.0 ? Label::right : Label::left; }

Label opposite(Label l) {
  if (l == Label::left) return Label::right;
  if (l == Label::right) return Label::left;
  return Label::unknown;
}

}  // namespace

double frame_determinant(const JetSample& s, Point2 at, Direction d) {
  const FrameExpressions& e = frame_expressions();
  if (!d.dual) return e.det(JetPoint{at.x, at.y, d.slope, s});
  return -e.det(JetPoint{at.y, at.x, d.slope, transpose_sample(s)});
}

Vec2 follow_direction(const JetSample& s, Vec2 reference, const Tolerances& tol) {
  const PointClass pc = classify_sample(s, tol);
  if (pc.kind != PointKind::hyperbolic)
    throw Error(ErrorCode::degenerate_point, "asymptotic curve left the hyperbolic domain");
  auto vs = asymptotic_vectors(s);
  Vec2 best{};
  double best_dot = -1.0;
  for (Vec2 v : vs) {
    v = (1.0 / norm(v)) * v;
    const double d = dot(v, reference);
    if (std::abs(d) > best_dot) {
      best_dot = std::abs(d);
      best = d < 0.0 ? -1.0 * v : v;
    }
  }
  return best;
}

Label label_direction(const MongeJet& jet, Point2 at, Direction d, const Tolerances& tol) {
  const double det = frame_determinant(jet.sample(at.x, at.y), at, d);
  if (std::abs(det) >= tol.frame) return label_of(det);

  // On the flecnodal curve the frame degenerates; sample both sides, with
  // shorter offsets when the domain is too thin for the default one.
  const int steps = 8;
  const char* why = "";
  for (double delta = tol.label_delta(); delta >= tol.label_delta() / 16; delta /= 4) {
    std::array<Label, 2> side{Label::unknown, Label::unknown};
    for (int k = 0; k < 2; ++k) {
      Vec2 dir = (k == 0 ? 1.0 : -1.0) * d.unit();
      try {
        const Point2 q = integrate(jet, at, dir, delta, steps, tol);
        const double dq = frame_determinant(jet.sample(q.x, q.y), q, Direction::from_vector(dir));
        if (std::abs(dq) >= tol.frame) side[k] = label_of(dq);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::degenerate_point) throw;
      }
    }
    if (side[0] == Label::unknown && side[1] == Label::unknown) {
      why = "both offset samples are degenerate";
      continue;
    }
    if (side[0] != Label::unknown && side[1] != Label::unknown && side[0] != side[1]) {
      why = "offset samples disagree";
      continue;
    }
    return side[0] != Label::unknown ? side[0] : side[1];
  }
  throw Error(ErrorCode::label_failure, why);
}

AsymptoticFrame left_right_label(const MongeJet& jet, const AsymptoticFrame& frame,
                                 const Tolerances& tol) {
  if (frame.kind != PointKind::hyperbolic || frame.count != 2)
    throw Error(ErrorCode::degenerate_point, "labels exist only at hyperbolic points");
  AsymptoticFrame out = frame;
  std::array<Label, 2> got{Label::unknown, Label::unknown};
  std::array<bool, 2> failed{false, false};
  for (int k = 0; k < 2; ++k) {
    try {
      got[k] = label_direction(jet, frame.point, frame.directions[k], tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::label_failure) throw;
      failed[k] = true;
    }
  }
  if (failed[0] && failed[1]) throw Error(ErrorCode::label_failure, "no direction could be labeled");
  if (failed[0]) got[0] = opposite(got[1]);
  if (failed[1]) got[1] = opposite(got[0]);
  if (got[0] == got[1]) throw Error(ErrorCode::label_failure, "both directions carry the same label");
  out.labels = got;
  return out;
}

AdaptedChart adapted_chart(const MongeJet& jet, double x, double y, ChartMode mode,
                           const Tolerances& tol) {
  const MongeJet g = translate_regraph(jet, x, y);
  AsymptoticFrame fr;
  try {
    fr = left_right_label(g, asymptotic_directions(g, 0.0, 0.0, tol), tol);
  } catch (const Error& e) {
    throw Error(ErrorCode::chart_failure, std::string("no adapted chart: ") + e.what());
  }
  const Vec2 right = fr.directions[fr.find(Label::right)].unit();
  Vec2 left = fr.directions[fr.find(Label::left)].unit();
  if (cross(right, left) < 0.0) left = -1.0 * left;
  if (std::abs(cross(right, left)) < 1e-12)
    throw Error(ErrorCode::chart_failure, "asymptotic directions are parallel");
  Mat2 basis = Mat2::columns(right, left);
  if (mode == ChartMode::diagonals) {
    const double h = std::sqrt(0.5);
    basis = basis * Mat2{h, -h, h, h};
  }
  AdaptedChart chart{linear_change(g, basis, 1.0), basis, 1.0};
  const JetSample s = chart.jet.sample(0.0, 0.0);
  const double scale = std::max({std::abs(s(2, 0)), std::abs(s(1, 1)), std::abs(s(0, 2))});
  const double lead = mode == ChartMode::axes ? s(1, 1) : s(2, 0);
  if (!(lead > 0.0))
    throw Error(ErrorCode::chart_failure, "right asymptotic direction does not carry f11 > 0");
  // Snap the rounding residue of the vanishing second-order partials.
  Poly2 poly = chart.jet.polynomial();
  if (mode == ChartMode::axes) {
    if (std::abs(s(2, 0)) > 1e-8 * scale || std::abs(s(0, 2)) > 1e-8 * scale)
      throw Error(ErrorCode::chart_failure, "asymptotic directions not mapped to the axes");
    poly.set(2, 0, 0.0);
    poly.set(0, 2, 0.0);
  } else {
    if (std::abs(s(1, 1)) > 1e-8 * scale || std::abs(s(2, 0) + s(0, 2)) > 1e-8 * scale)
      throw Error(ErrorCode::chart_failure, "asymptotic directions not mapped to the diagonals");
    poly.set(1, 1, 0.0);
    poly.set(0, 2, -poly.coeff(2, 0));
  }
  chart.jet = MongeJet(poly, jet.max_degree());
  return chart;
}

}  // namespace projumb
