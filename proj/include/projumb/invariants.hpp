#pragma once

// The cr-invariant, parity and index of hyperbonodes and ellipnodes, by the
// closed formulas and by the cross-ratio of the tangent lines.

#include <array>
#include <complex>

#include "projumb/geometry.hpp"
#include "projumb/jets.hpp"
#include "projumb/local_geometry.hpp"

namespace projumb {

/// Line A x + B y = 0 through the origin.
struct HomLine {
  double A = 0.0;
  double B = 0.0;
};

/// Point of the projective line as num : den (den = 0 is infinity).
struct HomPoint {
  double num = 0.0;
  double den = 1.0;
};

struct TangentLineSet {
  HomLine flec_left;   // L_Fl
  HomLine right;       // L_r (x-axis)
  HomLine flec_right;  // L_Fr
  HomLine left;        // L_l (y-axis)
};

struct PrenormalForm {
  double a = 0.0, b = 0.0, I = 0.0, J = 0.0;

  /// xy + (a x^3 y + b x y^3)/3! + (I x^4 + J y^4)/4!
  MongeJet jet(int max_degree = MongeJet::kDefaultDegree) const;
  /// 1 - ab/(IJ)
  ExtendedReal predicted_rho() const;
};

inline constexpr double kRhoDoubleNode = 1e-8;
inline constexpr double kRhoFlecNode = 1e8;
inline constexpr double kRhoDoubleEllipnode = 1e-6;

/// Tangent lines at an axes-adapted hyperbonode; throws not_adapted.
TangentLineSet flecnodal_tangent_lines(const MongeJet& adapted_jet);

/// Cross-ratio ((a-c)(b-d))/((a-d)(b-c)) of four projective points.
ExtendedReal cross_ratio(const std::array<HomPoint, 4>& pts);
/// Cross-ratio of (L_Fl, L_r, L_Fr, L_l) on the transversal y = 1.
ExtendedReal cross_ratio(const TangentLineSet& lines);
HomPoint on_transversal(const HomLine& line);

/// Axes formula for rho evaluated on the partials of an axes-adapted chart.
ExtendedReal rho_formula_axes(const JetSample& s);
/// Diagonal formula on the partials of a diagonal chart without cubic terms.
ExtendedReal rho_formula_diagonal(const JetSample& s);
/// Elliptic rho formula on the partials of a normalized elliptic chart without cubic terms.
double rho_formula_elliptic(const JetSample& s);

ExtendedReal rho_hyperbonode(const MongeJet& jet, Point2 node, const Tolerances& tol = {});
ExtendedReal rho_hyperbonode_diagonal(const MongeJet& jet, Point2 node,
                                      const Tolerances& tol = {});
int parity(const MongeJet& jet, Point2 node, const Tolerances& tol = {});
int index_hyperbonode(const MongeJet& jet, Point2 node, const Tolerances& tol = {});

/// sign(4 f11^2 f40 f04 - (3f21^2 - 2f11f31)(3f12^2 - 2f11f13)) in an axes chart;
/// 0 when the expression vanishes.
int index_expression_axes(const JetSample& s);
/// sign((f40+3f22)(f04+3f22) - (f31+3f13)(f13+3f31)) in a diagonal chart.
int index_expression_diagonal(const JetSample& s);
/// sign((f40+6f22+f04)^2 - 16(f31+f13)^2) in a diagonal chart.
int parity_expression_diagonal(const JetSample& s);

enum class QuadraticKind { hyperbolic, elliptic };  // x^2 - y^2 | x^2 + y^2

struct CubicRemoval {
  MongeJet jet;
  double alpha = 0.0;
  double beta = 0.0;
  double residual = 0.0;  // largest cubic coefficient before the map, after fitting
};

/// Removes a cubic part divisible by the quadratic part with the projective
/// map cubic_shift(alpha, beta). Throws not_a_node when the cubic is not
/// divisible within rel_tol.
CubicRemoval kill_cubic(const MongeJet& adapted_jet, QuadraticKind quadratic,
                        double rel_tol = 1e-10);

/// Chart at an elliptic point with quadratic part (x^2+y^2)/2 and no cubic terms.
AdaptedChart normalized_elliptic_chart(const MongeJet& jet, Point2 node,
                                       const Tolerances& tol = {});

double rho_ellipnode(const MongeJet& jet, Point2 node, const Tolerances& tol = {});

/// Cross-ratio of (L_Fbar, L, L_F, Lbar) from the intersections with the
/// line y = -ix + 2i; real up to rounding.
std::complex<double> ellipnode_cross_ratio(const MongeJet& normalized_jet);
double rho_ellipnode_oracle(const MongeJet& normalized_jet);

}  // namespace projumb
