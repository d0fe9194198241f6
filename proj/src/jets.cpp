#include "projumb/jets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "projumb/error.hpp"

namespace projumb {

namespace {

constexpr double kZeroCoefficient = 1e-15;

int tri_size(int degree) { return (degree + 1) * (degree + 2) / 2; }

double falling(int n, int k) {
  double r = 1.0;
  for (int m = 0; m < k; ++m) r *= static_cast<double>(n - m);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Poly2
// ---------------------------------------------------------------------------

Poly2::Poly2(int degree) : degree_(std::max(degree, 0)), c_(tri_size(degree_), 0.0) {}

int Poly2::effective_degree() const noexcept {
  for (int d = degree_; d >= 0; --d) {
    for (int j = 0; j <= d; ++j) {
      if (c_[index(d - j, j)] != 0.0) return d;
    }
  }
  return -1;
}

double Poly2::coeff(int i, int j) const noexcept {
  if (i < 0 || j < 0 || i + j > degree_) return 0.0;
  return c_[index(i, j)];
}

double& Poly2::at(int i, int j) {
  if (i < 0 || j < 0) throw Error(ErrorCode::invalid_argument, "negative exponent");
  if (i + j > degree_) {
    Poly2 grown(i + j);
    for (int d = 0; d <= degree_; ++d)
      for (int k = 0; k <= d; ++k) grown.c_[index(d - k, k)] = c_[index(d - k, k)];
    *this = std::move(grown);
  }
  return c_[index(i, j)];
}

double Poly2::eval(double x, double y) const noexcept {
  // Horner in y for each power of x, outer Horner in x.
  double acc = 0.0;
  for (int i = degree_; i >= 0; --i) {
    double inner = 0.0;
    for (int j = degree_ - i; j >= 0; --j) inner = inner * y + c_[index(i, j)];
    acc = acc * x + inner;
  }
  return acc;
}

Poly2 Poly2::derivative(int di, int dj) const {
  Poly2 out(std::max(degree_ - di - dj, 0));
  for (int d = di + dj; d <= degree_; ++d) {
    for (int j = dj; j <= d - di; ++j) {
      const int i = d - j;
      if (i < di) continue;
      const double c = c_[index(i, j)];
      if (c == 0.0) continue;
      out.c_[index(i - di, j - dj)] = c * falling(i, di) * falling(j, dj);
    }
  }
  return out;
}

Poly2 Poly2::truncated(int n) const {
  Poly2 out(n);
  const int top = std::min(n, degree_);
  for (int d = 0; d <= top; ++d)
    for (int j = 0; j <= d; ++j) out.c_[index(d - j, j)] = c_[index(d - j, j)];
  return out;
}

Poly2 Poly2::scaled(double s) const {
  Poly2 out = *this;
  for (double& c : out.c_) c *= s;
  return out;
}

Poly2 Poly2::homogeneous(int d) const {
  Poly2 out(std::max(d, 0));
  if (d < 0 || d > degree_) return out;
  for (int j = 0; j <= d; ++j) out.c_[index(d - j, j)] = c_[index(d - j, j)];
  return out;
}

Poly2 operator+(const Poly2& a, const Poly2& b) {
  Poly2 out(std::max(a.degree_, b.degree_));
  for (std::size_t k = 0; k < a.c_.size(); ++k) out.c_[k] += a.c_[k];
  for (std::size_t k = 0; k < b.c_.size(); ++k) out.c_[k] += b.c_[k];
  return out;
}

Poly2 operator-(const Poly2& a, const Poly2& b) { return a + b.scaled(-1.0); }

Poly2 operator*(const Poly2& a, const Poly2& b) {
  return Poly2::mul_trunc(a, b, a.degree_ + b.degree_);
}

Poly2 Poly2::constant(double c) {
  Poly2 out(0);
  out.c_[0] = c;
  return out;
}

Poly2 Poly2::monomial(int i, int j, double c) {
  Poly2 out(i + j);
  out.c_[index(i, j)] = c;
  return out;
}

Poly2 Poly2::mul_trunc(const Poly2& a, const Poly2& b, int n) {
  Poly2 out(n);
  for (int da = 0; da <= a.degree_ && da <= n; ++da) {
    for (int ja = 0; ja <= da; ++ja) {
      const double ca = a.c_[index(da - ja, ja)];
      if (ca == 0.0) continue;
      for (int db = 0; db <= b.degree_ && da + db <= n; ++db) {
        for (int jb = 0; jb <= db; ++jb) {
          const double cb = b.c_[index(db - jb, jb)];
          if (cb == 0.0) continue;
          out.c_[index(da - ja + db - jb, ja + jb)] += ca * cb;
        }
      }
    }
  }
  return out;
}

Poly2 Poly2::reciprocal(const Poly2& s, int n) {
  const double s0 = s.coeff(0, 0);
  if (s0 == 0.0) throw Error(ErrorCode::chart_failure, "series reciprocal of a series vanishing at the origin");
  // 1/s = (1/s0) sum_k (-r/s0)^k with r = s - s0.
  Poly2 r = s.truncated(n);
  r.c_[0] = 0.0;
  r = r.scaled(-1.0 / s0);
  Poly2 term = constant(1.0);
  Poly2 acc = constant(1.0);
  for (int k = 1; k <= n; ++k) {
    term = mul_trunc(term, r, n);
    acc = acc + term;
  }
  return acc.truncated(n).scaled(1.0 / s0);
}

Poly2 Poly2::compose(const Poly2& p, const Poly2& sx, const Poly2& sy, int n) {
  const int deg = p.effective_degree();
  Poly2 out(n);
  if (deg < 0) return out;
  std::vector<Poly2> xp{constant(1.0)}, yp{constant(1.0)};
  for (int k = 1; k <= deg; ++k) {
    xp.push_back(mul_trunc(xp.back(), sx, n));
    yp.push_back(mul_trunc(yp.back(), sy, n));
  }
  for (int d = 0; d <= deg; ++d) {
    for (int j = 0; j <= d; ++j) {
      const double c = p.c_[index(d - j, j)];
      if (c == 0.0) continue;
      out = out + mul_trunc(xp[d - j], yp[j], n).scaled(c);
    }
  }
  return out.truncated(n);
}

// ---------------------------------------------------------------------------
// MongeJet
// ---------------------------------------------------------------------------

MongeJet::MongeJet() : MongeJet(Poly2(kDefaultDegree), kDefaultDegree) {}

MongeJet::MongeJet(const Poly2& poly, int max_degree) : max_degree_(max_degree) {
  if (max_degree < kMinDegree || max_degree > kMaxDegree)
    throw Error(ErrorCode::invalid_argument,
                "max_degree must lie in [" + std::to_string(kMinDegree) + ", " +
                    std::to_string(kMaxDegree) + "]");
  if (poly.effective_degree() > max_degree)
    throw Error(ErrorCode::degree_overflow, "term of degree " +
                                                std::to_string(poly.effective_degree()) +
                                                " exceeds max_degree " +
                                                std::to_string(max_degree));
  poly_ = poly.truncated(max_degree);
  for (int d = 0; d <= max_degree; ++d)
    for (int j = 0; j <= d; ++j)
      if (std::abs(poly_.coeff(d - j, j)) < kZeroCoefficient) poly_.set(d - j, j, 0.0);
  partials_.reserve(tri_size(kSampleOrder));
  for (int d = 0; d <= kSampleOrder; ++d)
    for (int j = 0; j <= d; ++j) partials_.push_back(poly_.derivative(d - j, j));
}

MongeJet MongeJet::from_terms(std::span<const JetTerm> terms, int max_degree) {
  Poly2 poly(max_degree);
  for (const JetTerm& t : terms) {
    if (t.i < 0 || t.j < 0) throw Error(ErrorCode::invalid_argument, "negative exponent in term");
    if (t.i + t.j > max_degree)
      throw Error(ErrorCode::degree_overflow, "term x^" + std::to_string(t.i) + " y^" +
                                                  std::to_string(t.j) + " exceeds max_degree");
    poly.at(t.i, t.j) += t.c;
  }
  return MongeJet(poly, max_degree);
}

std::map<std::pair<int, int>, double> MongeJet::terms() const {
  std::map<std::pair<int, int>, double> out;
  for (int d = 0; d <= max_degree_; ++d)
    for (int j = 0; j <= d; ++j) {
      const double c = poly_.coeff(d - j, j);
      if (std::abs(c) >= kZeroCoefficient) out[{d - j, j}] = c;
    }
  return out;
}

double MongeJet::partial(int i, int j, double x, double y) const {
  if (i < 0 || j < 0) throw Error(ErrorCode::invalid_argument, "negative derivative order");
  if (i + j > max_degree_)
    throw Error(ErrorCode::degree_overflow, "derivative order " + std::to_string(i + j) +
                                                " exceeds max_degree " +
                                                std::to_string(max_degree_));
  if (i + j <= kSampleOrder) return partials_[JetSample::index(i, j)].eval(x, y);
  return poly_.derivative(i, j).eval(x, y);
}

JetSample MongeJet::sample(double x, double y) const noexcept {
  JetSample s;
  for (std::size_t k = 0; k < partials_.size(); ++k) s.f[k] = partials_[k].eval(x, y);
  return s;
}

MongeJet MongeJet::transposed() const {
  Poly2 t(max_degree_);
  for (int d = 0; d <= max_degree_; ++d)
    for (int j = 0; j <= d; ++j) t.set(j, d - j, poly_.coeff(d - j, j));
  return MongeJet(t, max_degree_);
}

MongeJet MongeJet::negated() const { return MongeJet(poly_.scaled(-1.0), max_degree_); }

bool operator==(const MongeJet& a, const MongeJet& b) { return a.terms() == b.terms(); }

double eval_partial(const MongeJet& jet, int i, int j, double x, double y) {
  return jet.partial(i, j, x, y);
}

MongeJet translate_regraph(const MongeJet& jet, double x0, double y0) {
  const int n = jet.max_degree();
  Poly2 sx = Poly2::monomial(1, 0) + Poly2::constant(x0);
  Poly2 sy = Poly2::monomial(0, 1) + Poly2::constant(y0);
  Poly2 g = Poly2::compose(jet.polynomial(), sx, sy, n);
  g.set(0, 0, 0.0);
  g.set(1, 0, 0.0);
  g.set(0, 1, 0.0);
  return MongeJet(g, n);
}

MongeJet linear_change(const MongeJet& jet, const Mat2& m, double z_scale) {
  const double det = m.det();
  const double size = std::abs(m.a) + std::abs(m.b) + std::abs(m.c) + std::abs(m.d);
  if (!(std::abs(det) > 1e-14 * size * size) || !std::isfinite(det))
    throw Error(ErrorCode::invalid_transform, "singular linear change of coordinates");
  if (z_scale == 0.0 || !std::isfinite(z_scale))
    throw Error(ErrorCode::invalid_transform, "z_scale must be finite and nonzero");
  const int n = jet.max_degree();
  Poly2 sx = Poly2::monomial(1, 0, m.a) + Poly2::monomial(0, 1, m.b);
  Poly2 sy = Poly2::monomial(1, 0, m.c) + Poly2::monomial(0, 1, m.d);
  return MongeJet(Poly2::compose(jet.polynomial(), sx, sy, n).scaled(1.0 / z_scale), n);
}

// ---------------------------------------------------------------------------
// ProjectiveMap
// ---------------------------------------------------------------------------

namespace {

double det4(ProjectiveMap::Matrix m) {
  double det = 1.0;
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (m[pivot][col] == 0.0) return 0.0;
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (int r = col + 1; r < 4; ++r) {
      const double factor = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= factor * m[col][c];
    }
  }
  return det;
}

}  // namespace

ProjectiveMap::ProjectiveMap() : m_{} {
  for (int k = 0; k < 4; ++k) m_[k][k] = 1.0;
}

ProjectiveMap::ProjectiveMap(const Matrix& m) : m_(m) {
  double scale = 0.0;
  for (const auto& row : m)
    for (double v : row) {
      if (!std::isfinite(v)) throw Error(ErrorCode::invalid_transform, "non-finite matrix entry");
      scale = std::max(scale, std::abs(v));
    }
  const double det = det4(m);
  if (scale == 0.0 || std::abs(det) <= 1e-14 * std::pow(scale, 4))
    throw Error(ErrorCode::invalid_transform, "singular projective matrix");
}

ProjectiveMap ProjectiveMap::cubic_shift(double alpha, double beta) {
  Matrix m{};
  for (int k = 0; k < 4; ++k) m[k][k] = 1.0;
  m[3][0] = -alpha;
  m[3][1] = -beta;
  return ProjectiveMap(m);
}

MongeJet project_regraph(const MongeJet& jet, const ProjectiveMap& map) {
  const int n = jet.max_degree();
  const auto& m = map.matrix();
  const double w = m[3][3];
  double scale = 0.0;
  for (const auto& row : m)
    for (double v : row) scale = std::max(scale, std::abs(v));
  if (std::abs(w) <= 1e-12 * scale)
    throw Error(ErrorCode::invalid_transform, "the map sends the origin to infinity");
  for (int r = 0; r < 3; ++r)
    if (std::abs(m[r][3]) > 1e-12 * scale)
      throw Error(ErrorCode::invalid_transform, "the map does not fix the origin");
  const Poly2& f = jet.polynomial();
  if (std::abs(f.coeff(0, 0)) > 1e-12)
    throw Error(ErrorCode::invalid_transform, "the origin does not lie on the surface");

  std::array<Poly2, 4> hom;
  for (int r = 0; r < 4; ++r) {
    hom[r] = Poly2::monomial(1, 0, m[r][0]) + Poly2::monomial(0, 1, m[r][1]) +
             f.scaled(m[r][2]) + Poly2::constant(r == 3 ? m[r][3] : 0.0);
    hom[r] = hom[r].truncated(n);
  }
  const Poly2 inv_w = Poly2::reciprocal(hom[3], n);
  const Poly2 big_x = Poly2::mul_trunc(hom[0], inv_w, n);
  const Poly2 big_y = Poly2::mul_trunc(hom[1], inv_w, n);
  const Poly2 big_z = Poly2::mul_trunc(hom[2], inv_w, n);

  const Mat2 lin{big_x.coeff(1, 0), big_x.coeff(0, 1), big_y.coeff(1, 0), big_y.coeff(0, 1)};
  const double lin_scale =
      std::abs(lin.a) + std::abs(lin.b) + std::abs(lin.c) + std::abs(lin.d);
  if (!(std::abs(lin.det()) > 1e-12 * lin_scale * lin_scale))
    throw Error(ErrorCode::chart_failure, "image tangent plane is vertical");
  const double inv_det = 1.0 / lin.det();
  const Mat2 lin_inv{lin.d * inv_det, -lin.b * inv_det, -lin.c * inv_det, lin.a * inv_det};

  // (x,y) as series in the image coordinates: u = A^{-1}((X,Y) - N(u)).
  Poly2 nl_x = big_x, nl_y = big_y;
  nl_x.set(1, 0, 0.0);
  nl_x.set(0, 1, 0.0);
  nl_y.set(1, 0, 0.0);
  nl_y.set(0, 1, 0.0);
  const Poly2 id_x = Poly2::monomial(1, 0), id_y = Poly2::monomial(0, 1);
  Poly2 ux = (id_x.scaled(lin_inv.a) + id_y.scaled(lin_inv.b)).truncated(n);
  Poly2 uy = (id_x.scaled(lin_inv.c) + id_y.scaled(lin_inv.d)).truncated(n);
  for (int iter = 1; iter < n; ++iter) {
    const Poly2 rx = id_x - Poly2::compose(nl_x, ux, uy, n);
    const Poly2 ry = id_y - Poly2::compose(nl_y, ux, uy, n);
    ux = (rx.scaled(lin_inv.a) + ry.scaled(lin_inv.b)).truncated(n);
    uy = (rx.scaled(lin_inv.c) + ry.scaled(lin_inv.d)).truncated(n);
  }
  return MongeJet(Poly2::compose(big_z, ux, uy, n), n);
}

// ---------------------------------------------------------------------------
// FamilyJet
// ---------------------------------------------------------------------------

FamilyJet::FamilyJet(std::map<std::pair<int, int>, std::vector<double>> terms, int max_degree)
    : terms_(std::move(terms)), max_degree_(max_degree) {
  if (max_degree < MongeJet::kMinDegree || max_degree > MongeJet::kMaxDegree)
    throw Error(ErrorCode::invalid_argument, "family max_degree out of range");
  for (const auto& [ij, coeffs] : terms_) {
    if (ij.first < 0 || ij.second < 0)
      throw Error(ErrorCode::invalid_argument, "negative exponent in family term");
    if (ij.first + ij.second > max_degree)
      throw Error(ErrorCode::degree_overflow, "family term exceeds max_degree");
  }
}

MongeJet FamilyJet::at(double t) const {
  Poly2 poly(max_degree_);
  for (const auto& [ij, coeffs] : terms_) {
    double v = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * t + *it;
    poly.at(ij.first, ij.second) += v;
  }
  return MongeJet(poly, max_degree_);
}

// ---------------------------------------------------------------------------
// DiffPoly
// ---------------------------------------------------------------------------

namespace {

// (i,j) of the partial carried by variable v >= 3.
std::pair<int, int> partial_of(int v) {
  const int k = v - 3;
  int d = 0;
  while ((d + 1) * (d + 2) / 2 <= k) ++d;
  const int j = k - d * (d + 1) / 2;
  return {d - j, j};
}

}  // namespace

DiffPoly DiffPoly::constant(double c) {
  DiffPoly out;
  if (c != 0.0) out.terms_[Monomial{}] = c;
  return out;
}

DiffPoly DiffPoly::variable(int var) {
  if (var < 0 || var >= jetvar::count)
    throw Error(ErrorCode::degree_overflow, "jet variable out of range");
  DiffPoly out;
  Monomial m{};
  m[var] = 1;
  out.terms_[m] = 1.0;
  return out;
}

void DiffPoly::add_term(const Monomial& m, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

DiffPoly DiffPoly::shifted(int di, int dj) const {
  const int own = di == 1 ? jetvar::x : jetvar::y;
  DiffPoly out;
  for (const auto& [m, c] : terms_) {
    for (int v = 0; v < jetvar::count; ++v) {
      const int e = m[v];
      if (e == 0) continue;
      if (v == own) {
        Monomial n = m;
        --n[v];
        out.add_term(n, c * e);
      } else if (v >= 3) {
        const auto [i, j] = partial_of(v);
        if (i + j + 1 > kSampleOrder)
          throw Error(ErrorCode::degree_overflow,
                      "total derivative needs partials beyond order " +
                          std::to_string(kSampleOrder));
        Monomial n = m;
        --n[v];
        ++n[jetvar::f(i + di, j + dj)];
        out.add_term(n, c * e);
      }
    }
  }
  return out;
}

DiffPoly DiffPoly::partial_x() const { return shifted(1, 0); }
DiffPoly DiffPoly::partial_y() const { return shifted(0, 1); }

DiffPoly DiffPoly::partial_p() const {
  DiffPoly out;
  for (const auto& [m, c] : terms_) {
    const int e = m[jetvar::p];
    if (e == 0) continue;
    Monomial n = m;
    --n[jetvar::p];
    out.add_term(n, c * e);
  }
  return out;
}

namespace {

double var_value(const JetPoint& at, int v) noexcept {
  switch (v) {
    case jetvar::x: return at.x;
    case jetvar::y: return at.y;
    case jetvar::p: return at.p;
    default: return at.partials.f[v - 3];
  }
}

double ipow(double b, int e) noexcept {
  double r = 1.0;
  for (int k = 0; k < e; ++k) r *= b;
  return r;
}

}  // namespace

double DiffPoly::eval(const JetPoint& at) const noexcept {
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c;
    for (int v = 0; v < jetvar::count; ++v)
      if (m[v]) t *= ipow(var_value(at, v), m[v]);
    sum += t;
  }
  return sum;
}

DiffPoly& DiffPoly::operator+=(const DiffPoly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

DiffPoly& DiffPoly::operator-=(const DiffPoly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
  DiffPoly out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      DiffPoly::Monomial m;
      for (int v = 0; v < jetvar::count; ++v) {
        const int e = ma[v] + mb[v];
        if (e > 255) throw Error(ErrorCode::degree_overflow, "monomial exponent overflow");
        m[v] = static_cast<std::uint8_t>(e);
      }
      out.add_term(m, ca * cb);
    }
  return out;
}

DiffPoly operator*(double s, const DiffPoly& a) {
  DiffPoly out;
  if (s == 0.0) return out;
  for (const auto& [m, c] : a.terms_) out.add_term(m, s * c);
  return out;
}

namespace {

bool is_one(const DiffPoly& p) {
  return p.size() == 1 && p.terms().begin()->first == DiffPoly::Monomial{} &&
         p.terms().begin()->second == 1.0;
}

// Q (g_x + p g_y) + P g_p: the total derivative of a polynomial times Q.
DiffPoly scaled_total(const DiffPoly& g, const DiffRational& field) {
  return field.den * (g.partial_x() + DiffPoly::p() * g.partial_y()) + field.num * g.partial_p();
}

}  // namespace

DiffRational total_derivative(const DiffPoly& expr, const DiffRational& slope_field) {
  return {scaled_total(expr, slope_field), slope_field.den};
}

DiffRational total_derivative(const DiffRational& expr, const DiffRational& slope_field) {
  if (is_one(expr.den)) return total_derivative(expr.num, slope_field);
  const DiffPoly dn = scaled_total(expr.num, slope_field);
  const DiffPoly dm = scaled_total(expr.den, slope_field);
  return {dn * expr.den - expr.num * dm, slope_field.den * expr.den * expr.den};
}

CompiledDiffPoly::CompiledDiffPoly(const DiffPoly& poly) {
  terms_.reserve(poly.size());
  for (const auto& [m, c] : poly.terms()) {
    Term t{c, static_cast<std::uint32_t>(factors_.size()), 0};
    for (int v = 0; v < jetvar::count; ++v)
      if (m[v]) {
        factors_.emplace_back(static_cast<std::uint8_t>(v), m[v]);
        ++t.count;
      }
    terms_.push_back(t);
  }
}

double CompiledDiffPoly::eval(const JetPoint& at) const noexcept {
  std::array<double, jetvar::count> vals;
  vals[jetvar::x] = at.x;
  vals[jetvar::y] = at.y;
  vals[jetvar::p] = at.p;
  for (int v = 3; v < jetvar::count; ++v) vals[v] = at.partials.f[v - 3];
  double sum = 0.0;
  for (const Term& t : terms_) {
    double r = t.coef;
    for (std::uint32_t k = t.first; k < t.first + t.count; ++k)
      r *= ipow(vals[factors_[k].first], factors_[k].second);
    sum += r;
  }
  return sum;
}

}  // namespace projumb
