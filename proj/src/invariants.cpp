#include "projumb/invariants.hpp"

#include <algorithm>
#include <cmath>

#include "projumb/error.hpp"

namespace projumb {

namespace {

using cplx = std::complex<double>;

double third_scale(const JetSample& s) {
  double m = 0.0;
  for (int d = 2; d <= 4; ++d)
    for (int j = 0; j <= d; ++j) m = std::max(m, std::abs(s(d - j, j)));
  return std::max(m, 1.0);
}

// f40 f04 vanishing relative to its factors.
bool biflecnodal(double f40, double f04) {
  return std::abs(f40 * f04) <= 1e-13 * (f40 * f40 + f04 * f04);
}

ExtendedReal one_minus_ratio(double num, double den) {
  if (den == 0.0) {
    if (num == 0.0) throw Error(ErrorCode::indeterminate, "cr-invariant is 0/0");
    return ExtendedReal::infinity();
  }
  return ExtendedReal::finite(1.0 - num / den);
}

void require_hyperbonode_chart(const JetSample& s, const char* what) {
  const double scale = third_scale(s);
  if (std::abs(s(3, 0)) + std::abs(s(0, 3)) > 1e-6 * scale)
    throw Error(ErrorCode::precondition,
                std::string(what) + ": point is not a hyperbonode (f30, f03 do not vanish)");
}

JetSample adapted_sample(const MongeJet& jet, Point2 node, ChartMode mode, const Tolerances& tol,
                         AdaptedChart* out = nullptr) {
  AdaptedChart chart;
  try {
    chart = adapted_chart(jet, node.x, node.y, mode, tol);
  } catch (const Error& e) {
    throw Error(ErrorCode::precondition, std::string("no adapted chart at the node: ") + e.what());
  }
  JetSample s = chart.jet.sample(0.0, 0.0);
  if (out) *out = std::move(chart);
  return s;
}

}  // namespace

MongeJet PrenormalForm::jet(int max_degree) const {
  const JetTerm t[] = {{1, 1, 1.0}, {3, 1, a / 6.0}, {1, 3, b / 6.0}, {4, 0, I / 24.0},
                       {0, 4, J / 24.0}};
  return MongeJet::from_terms(t, max_degree);
}

ExtendedReal PrenormalForm::predicted_rho() const {
  if (I * J == 0.0) return ExtendedReal::infinity();
  return ExtendedReal::finite(1.0 - a * b / (I * J));
}

TangentLineSet flecnodal_tangent_lines(const MongeJet& adapted_jet) {
  const JetSample s = adapted_jet.sample(0.0, 0.0);
  const double scale = third_scale(s);
  const double f11 = s(1, 1);
  if (std::abs(s(2, 0)) + std::abs(s(0, 2)) > 1e-10 * scale || f11 == 0.0 ||
      std::abs(s(3, 0)) + std::abs(s(0, 3)) > 1e-6 * scale)
    throw Error(ErrorCode::not_adapted, "jet is not an axes-adapted hyperbonode chart");
  const double f21 = s(2, 1), f12 = s(1, 2), f31 = s(3, 1), f13 = s(1, 3);
  TangentLineSet t;
  t.flec_right = {2 * f11 * s(4, 0), -(3 * f21 * f21 - 2 * f11 * f31)};
  t.flec_left = {-(3 * f12 * f12 - 2 * f11 * f13), 2 * f11 * s(0, 4)};
  t.right = {0.0, 1.0};
  t.left = {1.0, 0.0};
  return t;
}

HomPoint on_transversal(const HomLine& line) {
  // A x + B = 0 on y = 1.
  return {-line.B, line.A};
}

ExtendedReal cross_ratio(const std::array<HomPoint, 4>& pts) {
  std::array<HomPoint, 4> p = pts;
  for (HomPoint& q : p) {
    const double n = std::hypot(q.num, q.den);
    if (n == 0.0) throw Error(ErrorCode::indeterminate, "degenerate line in cross-ratio");
    q = {q.num / n, q.den / n};
  }
  auto wedge = [](const HomPoint& u, const HomPoint& v) {
    const double w = u.num * v.den - v.num * u.den;
    return std::abs(w) < 1e-15 ? 0.0 : w;
  };
  const double num = wedge(p[0], p[2]) * wedge(p[1], p[3]);
  const double den = wedge(p[0], p[3]) * wedge(p[1], p[2]);
  if (den == 0.0) {
    if (num == 0.0) throw Error(ErrorCode::indeterminate, "cross-ratio is 0/0");
    return ExtendedReal::infinity();
  }
  return ExtendedReal::finite(num / den);
}

ExtendedReal cross_ratio(const TangentLineSet& lines) {
  return cross_ratio({on_transversal(lines.flec_left), on_transversal(lines.right),
                      on_transversal(lines.flec_right), on_transversal(lines.left)});
}

ExtendedReal rho_formula_axes(const JetSample& s) {
  const double f11 = s(1, 1), f40 = s(4, 0), f04 = s(0, 4);
  const double num = (3 * s(2, 1) * s(2, 1) - 2 * f11 * s(3, 1)) *
                     (3 * s(1, 2) * s(1, 2) - 2 * f11 * s(1, 3));
  const double den = biflecnodal(f40, f04) ? 0.0 : 4 * f11 * f11 * f40 * f04;
  return one_minus_ratio(num, den);
}

ExtendedReal rho_formula_diagonal(const JetSample& s) {
  const double f40 = s(4, 0), f04 = s(0, 4), f22 = s(2, 2), f31 = s(3, 1), f13 = s(1, 3);
  const double num = 4 * ((f40 + 3 * f22) * (f04 + 3 * f22) - (f31 + 3 * f13) * (f13 + 3 * f31));
  const double u = f40 + 6 * f22 + f04, v = 4 * (f31 + f13);
  double den = u * u - v * v;
  if (std::abs(den) <= 1e-13 * (u * u + v * v)) den = 0.0;
  if (den == 0.0) {
    if (num == 0.0) throw Error(ErrorCode::indeterminate, "diagonal cr-invariant is 0/0");
    return ExtendedReal::infinity();
  }
  return ExtendedReal::finite(num / den);
}

double rho_formula_elliptic(const JetSample& s) {
  const double f40 = s(4, 0), f04 = s(0, 4), f22 = s(2, 2), f31 = s(3, 1), f13 = s(1, 3);
  const double num = 4 * ((f40 - 3 * f22) * (f04 - 3 * f22) - (f31 - 3 * f13) * (f13 - 3 * f31));
  const double u = f40 - 6 * f22 + f04, v = 4 * (f31 - f13);
  const double den = u * u + v * v;
  const double scale = std::max({1.0, std::abs(f40), std::abs(f04), std::abs(f22), std::abs(f31),
                                 std::abs(f13)});
  if (den < 1e-14 * scale * scale)
    throw Error(ErrorCode::non_generic, "ellipnode cr-invariant denominator vanishes");
  return num / den;
}

ExtendedReal rho_hyperbonode(const MongeJet& jet, Point2 node, const Tolerances& tol) {
  const JetSample s = adapted_sample(jet, node, ChartMode::axes, tol);
  require_hyperbonode_chart(s, "rho_hyperbonode");
  return rho_formula_axes(s);
}

CubicRemoval kill_cubic(const MongeJet& adapted_jet, QuadraticKind quadratic, double rel_tol) {
  const double q20 = adapted_jet.coefficient(2, 0), q11 = adapted_jet.coefficient(1, 1),
               q02 = adapted_jet.coefficient(0, 2);
  const double qs = std::max({std::abs(q20), std::abs(q11), std::abs(q02)});
  const double sign = quadratic == QuadraticKind::hyperbolic ? -1.0 : 1.0;
  if (qs == 0.0 || std::abs(q11) > 1e-8 * qs || std::abs(q02 - sign * q20) > 1e-8 * qs)
    throw Error(ErrorCode::precondition,
                quadratic == QuadraticKind::hyperbolic
                    ? "quadratic part is not proportional to x^2 - y^2"
                    : "quadratic part is not proportional to x^2 + y^2");
  const std::array<double, 4> c{adapted_jet.coefficient(3, 0), adapted_jet.coefficient(2, 1),
                                adapted_jet.coefficient(1, 2), adapted_jet.coefficient(0, 3)};
  // Q (alpha x + beta y) coefficient rows for x^3, x^2y, xy^2, y^3.
  const std::array<std::array<double, 2>, 4> rows{{{q20, 0.0}, {q11, q20}, {q02, q11}, {0.0, q02}}};
  double n11 = 0, n12 = 0, n22 = 0, r1 = 0, r2 = 0;
  for (int k = 0; k < 4; ++k) {
    n11 += rows[k][0] * rows[k][0];
    n12 += rows[k][0] * rows[k][1];
    n22 += rows[k][1] * rows[k][1];
    r1 += rows[k][0] * c[k];
    r2 += rows[k][1] * c[k];
  }
  const double det = n11 * n22 - n12 * n12;
  CubicRemoval out{adapted_jet, 0.0, 0.0, 0.0};
  out.alpha = (r1 * n22 - r2 * n12) / det;
  out.beta = (n11 * r2 - n12 * r1) / det;
  double cs = 0.0;
  for (int k = 0; k < 4; ++k) {
    out.residual = std::max(out.residual,
                            std::abs(c[k] - rows[k][0] * out.alpha - rows[k][1] * out.beta));
    cs = std::max(cs, std::abs(c[k]));
  }
  if (out.residual > rel_tol * std::max({1.0, cs, qs}))
    throw Error(ErrorCode::not_a_node, "cubic part is not divisible by the quadratic part");
  if (out.alpha == 0.0 && out.beta == 0.0) return out;
  Poly2 poly =
      project_regraph(adapted_jet, ProjectiveMap::cubic_shift(out.alpha, out.beta)).polynomial();
  // The remaining cubic is the fitting residual; drop it.
  for (int j = 0; j <= 3; ++j) poly.set(3 - j, j, 0.0);
  out.jet = MongeJet(poly, adapted_jet.max_degree());
  return out;
}

ExtendedReal rho_hyperbonode_diagonal(const MongeJet& jet, Point2 node, const Tolerances& tol) {
  AdaptedChart chart;
  const JetSample axes = adapted_sample(jet, node, ChartMode::axes, tol);
  require_hyperbonode_chart(axes, "rho_hyperbonode_diagonal");
  adapted_sample(jet, node, ChartMode::diagonals, tol, &chart);
  CubicRemoval cr;
  try {
    cr = kill_cubic(chart.jet, QuadraticKind::hyperbolic, 1e-6);
  } catch (const Error& e) {
    throw Error(ErrorCode::normalization, std::string("cubic removal failed: ") + e.what());
  }
  return rho_formula_diagonal(cr.jet.sample(0.0, 0.0));
}

int index_expression_axes(const JetSample& s) {
  const double f11 = s(1, 1);
  const double n = (3 * s(2, 1) * s(2, 1) - 2 * f11 * s(3, 1)) *
                   (3 * s(1, 2) * s(1, 2) - 2 * f11 * s(1, 3));
  return sign_of(4 * f11 * f11 * s(4, 0) * s(0, 4) - n);
}

int index_expression_diagonal(const JetSample& s) {
  const double f40 = s(4, 0), f04 = s(0, 4), f22 = s(2, 2), f31 = s(3, 1), f13 = s(1, 3);
  return sign_of((f40 + 3 * f22) * (f04 + 3 * f22) - (f31 + 3 * f13) * (f13 + 3 * f31));
}

int parity_expression_diagonal(const JetSample& s) {
  const double u = s(4, 0) + 6 * s(2, 2) + s(0, 4), v = 4 * (s(3, 1) + s(1, 3));
  return sign_of(u * u - v * v);
}

int parity(const MongeJet& jet, Point2 node, const Tolerances& tol) {
  const JetSample s = adapted_sample(jet, node, ChartMode::axes, tol);
  require_hyperbonode_chart(s, "parity");
  if (biflecnodal(s(4, 0), s(0, 4)))
    throw Error(ErrorCode::biflecnode_degenerate, "f40 f04 vanishes: parity undefined");
  return sign_of(s(4, 0) * s(0, 4));
}

int index_hyperbonode(const MongeJet& jet, Point2 node, const Tolerances& tol) {
  const JetSample s = adapted_sample(jet, node, ChartMode::axes, tol);
  require_hyperbonode_chart(s, "index_hyperbonode");
  ExtendedReal rho;
  try {
    rho = rho_formula_axes(s);
  } catch (const Error&) {
    throw Error(ErrorCode::degenerate_index, "index undefined at a 0/0 node");
  }
  if (rho.infinite || std::abs(rho.value) <= kRhoDoubleNode || std::abs(rho.value) >= kRhoFlecNode ||
      biflecnodal(s(4, 0), s(0, 4)))
    throw Error(ErrorCode::degenerate_index, "index undefined at a degenerate hyperbonode");
  const int ind = index_expression_axes(s);
  if (ind != sign_of(s(4, 0) * s(0, 4)) * sign_of(rho.value))
    throw Error(ErrorCode::degenerate_index, "index formulas disagree");
  return ind;
}

AdaptedChart normalized_elliptic_chart(const MongeJet& jet, Point2 node, const Tolerances& tol) {
  const MongeJet g = translate_regraph(jet, node.x, node.y);
  const JetSample s = g.sample(0.0, 0.0);
  if (classify_sample(s, tol).kind != PointKind::elliptic)
    throw Error(ErrorCode::precondition, "point is not elliptic");
  double h11 = s(2, 0), h12 = s(1, 1), h22 = s(0, 2);
  double z_scale = 1.0;
  if (h11 < 0.0) {
    z_scale = -1.0;
    h11 = -h11;
    h12 = -h12;
    h22 = -h22;
  }
  // m = L^{-T} with H = L L^T, so that m^T H m = identity.
  const double l11 = std::sqrt(h11), l21 = h12 / l11, l22 = std::sqrt(h22 - l21 * l21);
  const Mat2 m{1.0 / l11, -l21 / (l11 * l22), 0.0, 1.0 / l22};
  Poly2 poly = linear_change(g, m, z_scale).polynomial();
  poly.set(2, 0, 0.5);
  poly.set(1, 1, 0.0);
  poly.set(0, 2, 0.5);
  MongeJet normalized(poly, jet.max_degree());
  CubicRemoval cr;
  try {
    cr = kill_cubic(normalized, QuadraticKind::elliptic, 1e-6);
  } catch (const Error& e) {
    throw Error(ErrorCode::precondition, std::string("point is not an ellipnode: ") + e.what());
  }
  return {cr.jet, m, z_scale};
}

double rho_ellipnode(const MongeJet& jet, Point2 node, const Tolerances& tol) {
  const AdaptedChart chart = normalized_elliptic_chart(jet, node, tol);
  return rho_formula_elliptic(chart.jet.sample(0.0, 0.0));
}

std::complex<double> ellipnode_cross_ratio(const MongeJet& normalized_jet) {
  const JetSample s = normalized_jet.sample(0.0, 0.0);
  const double qs = std::max(std::abs(s(2, 0)), std::abs(s(0, 2)));
  if (!(s(2, 0) > 0.0) || std::abs(s(1, 1)) > 1e-8 * qs || std::abs(s(2, 0) - s(0, 2)) > 1e-8 * qs)
    throw Error(ErrorCode::precondition, "quadratic part is not a multiple of x^2 + y^2");
  const double scale = third_scale(s);
  if (std::abs(s(3, 0)) + std::abs(s(2, 1)) + std::abs(s(1, 2)) + std::abs(s(0, 3)) > 1e-8 * scale)
    throw Error(ErrorCode::precondition, "cubic terms are present");
  const double f40 = s(4, 0), f04 = s(0, 4), f22 = s(2, 2), f31 = s(3, 1), f13 = s(1, 3);
  const cplx i(0.0, 1.0);
  const cplx a = (f40 - 3 * f22) + i * (3 * f31 - f13);
  const cplx b = (f31 - 3 * f13) - i * (f04 - 3 * f22);
  // Points on y = -ix + 2i as num : den.
  struct P {
    cplx num, den;
  };
  const P fl{2.0 * i * b, b * i - a};
  const P fb{2.0 * i * std::conj(b), std::conj(b) * i - std::conj(a)};
  const P ll{1.0, 1.0};
  const P lb{1.0, 0.0};
  auto wedge = [](const P& u, const P& v) { return u.num * v.den - v.num * u.den; };
  // (L_Fbar, L, L_F, Lbar)
  const cplx num = wedge(fb, fl) * wedge(ll, lb);
  const cplx den = wedge(fb, lb) * wedge(ll, fl);
  const double nscale = std::abs(fl.num) + std::abs(fl.den);
  if (std::abs(den) <= 1e-14 * nscale * nscale)
    throw Error(ErrorCode::indeterminate, "flecnodal tangent coincides with an asymptotic line");
  return num / den;
}

double rho_ellipnode_oracle(const MongeJet& normalized_jet) {
  return ellipnode_cross_ratio(normalized_jet).real();
}

}  // namespace projumb
