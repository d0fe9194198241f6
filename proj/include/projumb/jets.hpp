#pragma once

// Polynomial Monge jets z = f(x,y): exact partial derivatives, regraphing
// under affine and projective changes of chart, 1-parameter families, and
// differential polynomials over the jet variables for total derivatives
// along slope fields.

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "projumb/geometry.hpp"

namespace projumb {

/// Dense bivariate polynomial sum c_ij x^i y^j with i+j <= degree().
/// Doubles as a truncated power series when the *_trunc helpers are used.
class Poly2 {
 public:
  Poly2() : Poly2(0) {}
  explicit Poly2(int degree);

  int degree() const noexcept { return degree_; }
  /// Largest i+j carrying a nonzero coefficient, -1 for the zero polynomial.
  int effective_degree() const noexcept;

  double coeff(int i, int j) const noexcept;
  double& at(int i, int j);
  void set(int i, int j, double c) { at(i, j) = c; }

  double eval(double x, double y) const noexcept;
  Poly2 derivative(int i, int j) const;
  Poly2 truncated(int n) const;
  Poly2 scaled(double s) const;

  /// Homogeneous part of total degree d.
  Poly2 homogeneous(int d) const;

  friend Poly2 operator+(const Poly2& a, const Poly2& b);
  friend Poly2 operator-(const Poly2& a, const Poly2& b);
  friend Poly2 operator*(const Poly2& a, const Poly2& b);

  static Poly2 constant(double c);
  static Poly2 monomial(int i, int j, double c = 1.0);
  /// Product truncated at total degree n.
  static Poly2 mul_trunc(const Poly2& a, const Poly2& b, int n);
  /// Series reciprocal 1/s truncated at n; requires s(0,0) != 0.
  static Poly2 reciprocal(const Poly2& s, int n);
  /// p(sx(x,y), sy(x,y)) truncated at n.
  static Poly2 compose(const Poly2& p, const Poly2& sx, const Poly2& sy, int n);

 private:
  static int index(int i, int j) noexcept {
    const int d = i + j;
    return d * (d + 1) / 2 + j;
  }

  int degree_;
  std::vector<double> c_;
};

/// Highest derivative order precomputed by MongeJet::sample.
inline constexpr int kSampleOrder = 6;

/// All partial derivatives f_ij(x,y), i+j <= kSampleOrder, at one point.
/// Orders beyond the jet's max_degree read as zero.
struct JetSample {
  std::array<double, (kSampleOrder + 1) * (kSampleOrder + 2) / 2> f{};

  static constexpr int index(int i, int j) noexcept {
    const int d = i + j;
    return d * (d + 1) / 2 + j;
  }
  double operator()(int i, int j) const noexcept { return f[index(i, j)]; }
};

struct JetTerm {
  int i;
  int j;
  double c;
};

/// Polynomial surface z = f(x,y) with exact coefficient access.
/// Immutable after construction.
class MongeJet {
 public:
  static constexpr int kDefaultDegree = 5;
  static constexpr int kMinDegree = 4;
  static constexpr int kMaxDegree = 24;

  MongeJet();
  /// Throws degree_overflow when poly carries a term above max_degree.
  explicit MongeJet(const Poly2& poly, int max_degree = kDefaultDegree);
  static MongeJet from_terms(std::span<const JetTerm> terms,
                             int max_degree = kDefaultDegree);

  int max_degree() const noexcept { return max_degree_; }
  const Poly2& polynomial() const noexcept { return poly_; }
  /// Canonical term map: coefficients with |c| < 1e-15 dropped.
  std::map<std::pair<int, int>, double> terms() const;
  /// Monomial coefficient of x^i y^j (not the Taylor derivative).
  double coefficient(int i, int j) const noexcept { return poly_.coeff(i, j); }

  double value(double x, double y) const noexcept { return poly_.eval(x, y); }
  /// d^{i+j} f / dx^i dy^j at (x,y); degree_overflow when i+j > max_degree.
  double partial(int i, int j, double x, double y) const;
  JetSample sample(double x, double y) const noexcept;

  /// The jet of f(y,x).
  MongeJet transposed() const;
  MongeJet negated() const;

  friend bool operator==(const MongeJet& a, const MongeJet& b);

 private:
  Poly2 poly_;
  int max_degree_;
  std::vector<Poly2> partials_;  // JetSample::index(i,j), i+j <= kSampleOrder
};

double eval_partial(const MongeJet& jet, int i, int j, double x, double y);

/// g(x,y) = f(x+x0,y+y0) - f(x0,y0) - f_10(x0,y0) x - f_01(x0,y0) y.
MongeJet translate_regraph(const MongeJet& jet, double x0, double y0);

/// Jet of (x,y) -> f(m (x,y)) / z_scale.
MongeJet linear_change(const MongeJet& jet, const Mat2& m, double z_scale);

/// Projective transformation of RP^3 acting on [x:y:z:1].
class ProjectiveMap {
 public:
  using Matrix = std::array<std::array<double, 4>, 4>;

  ProjectiveMap();  // identity
  /// Throws invalid_transform for a singular matrix.
  explicit ProjectiveMap(const Matrix& m);

  const Matrix& matrix() const noexcept { return m_; }
  double operator()(int r, int c) const noexcept { return m_[r][c]; }

  /// [x:y:z:w] -> [x:y:z:w - alpha x - beta y]. To third order this acts on a
  /// Monge jet like z -> z / (1 + alpha x + beta y), changing its cubic part
  /// C into C - Q (alpha x + beta y).
  static ProjectiveMap cubic_shift(double alpha, double beta);

 private:
  Matrix m_;
};

/// Monge jet of the image surface, regraphed by power-series inversion and
/// truncated at max_degree. The map must fix the origin, which must lie on
/// the surface. Throws chart_failure when the image tangent plane is vertical.
MongeJet project_regraph(const MongeJet& jet, const ProjectiveMap& map);

/// 1-parameter family: every coefficient is a polynomial in t (lowest order
/// first).
class FamilyJet {
 public:
  FamilyJet() = default;
  FamilyJet(std::map<std::pair<int, int>, std::vector<double>> terms,
            int max_degree);

  int max_degree() const noexcept { return max_degree_; }
  const std::map<std::pair<int, int>, std::vector<double>>& terms() const noexcept {
    return terms_;
  }
  MongeJet at(double t) const;

 private:
  std::map<std::pair<int, int>, std::vector<double>> terms_;
  int max_degree_ = MongeJet::kDefaultDegree;
};

// ---------------------------------------------------------------------------
// Differential polynomials
// ---------------------------------------------------------------------------

/// Variables of the jet-space differential algebra: x, y, the slope p and the
/// surface partials f_ij(x,y) for i+j <= kSampleOrder.
namespace jetvar {
inline constexpr int x = 0;
inline constexpr int y = 1;
inline constexpr int p = 2;
inline constexpr int count = 3 + (kSampleOrder + 1) * (kSampleOrder + 2) / 2;
constexpr int f(int i, int j) noexcept { return 3 + JetSample::index(i, j); }
}  // namespace jetvar

/// Point in jet space at which differential polynomials are evaluated.
struct JetPoint {
  double x = 0.0;
  double y = 0.0;
  double p = 0.0;
  JetSample partials;
};

/// Polynomial in x, y, p and the partials f_ij. Partial derivatives in x and
/// y act on f_ij by shifting the index, so D/dx = d/dx + p d/dy + p' d/dp is
/// exact polynomial arithmetic.
class DiffPoly {
 public:
  using Monomial = std::array<std::uint8_t, jetvar::count>;

  DiffPoly() = default;
  static DiffPoly constant(double c);
  static DiffPoly variable(int var);
  static DiffPoly x() { return variable(jetvar::x); }
  static DiffPoly y() { return variable(jetvar::y); }
  static DiffPoly p() { return variable(jetvar::p); }
  static DiffPoly f(int i, int j) { return variable(jetvar::f(i, j)); }

  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }
  const std::map<Monomial, double>& terms() const noexcept { return terms_; }

  /// Throws degree_overflow if a shifted partial would exceed kSampleOrder.
  DiffPoly partial_x() const;
  DiffPoly partial_y() const;
  DiffPoly partial_p() const;

  double eval(const JetPoint& at) const noexcept;

  DiffPoly& operator+=(const DiffPoly& o);
  DiffPoly& operator-=(const DiffPoly& o);
  friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
  friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }
  friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b);
  friend DiffPoly operator*(double s, const DiffPoly& a);

 private:
  DiffPoly shifted(int di, int dj) const;
  void add_term(const Monomial& m, double c);

  std::map<Monomial, double> terms_;
};

struct DiffRational {
  DiffPoly num;
  DiffPoly den = DiffPoly::constant(1.0);

  double eval(const JetPoint& at) const noexcept {
    return num.eval(at) / den.eval(at);
  }
};

/// Total derivative D/dx = d/dx + p d/dy + p'(x,y,p) d/dp of a rational
/// differential expression along the slope field p'.
DiffRational total_derivative(const DiffRational& expr, const DiffRational& slope_field);
DiffRational total_derivative(const DiffPoly& expr, const DiffRational& slope_field);

/// Flattened DiffPoly for repeated evaluation.
class CompiledDiffPoly {
 public:
  CompiledDiffPoly() = default;
  explicit CompiledDiffPoly(const DiffPoly& poly);
  double eval(const JetPoint& at) const noexcept;

 private:
  struct Term {
    double coef;
    std::uint32_t first;
    std::uint32_t count;
  };
  std::vector<Term> terms_;
  std::vector<std::pair<std::uint8_t, std::uint8_t>> factors_;
};

}  // namespace projumb
