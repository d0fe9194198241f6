#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "projumb/error.hpp"
#include "projumb/invariants.hpp"

using namespace projumb;

namespace {

MongeJet make(std::initializer_list<JetTerm> terms, int degree = 5) {
  return MongeJet::from_terms(std::span<const JetTerm>(terms.begin(), terms.size()), degree);
}

// Axes-adapted hyperbonode: f20 = f02 = f30 = f03 = 0, f11 > 0, the other
// partials up to order 4 uniform in [-2,2] (as monomial coefficients).
MongeJet random_adapted(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Poly2 p(5);
  p.set(1, 1, std::abs(u(rng)) + 0.1);
  p.set(2, 1, u(rng) / 2);
  p.set(1, 2, u(rng) / 2);
  for (int j = 0; j <= 4; ++j) p.set(4 - j, j, u(rng) / 24);
  for (int j = 0; j <= 5; ++j) p.set(5 - j, j, u(rng) / 120);
  return MongeJet(p, 5);
}

// Elliptic chart (x^2+y^2)/2 with random quartic and quintic parts.
MongeJet random_normalized_elliptic(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Poly2 p(5);
  p.set(2, 0, 0.5);
  p.set(0, 2, 0.5);
  for (int d = 4; d <= 5; ++d)
    for (int j = 0; j <= d; ++j) p.set(d - j, j, u(rng) / 24);
  return MongeJet(p, 5);
}

double value(ExtendedReal r) {
  REQUIRE_FALSE(r.infinite);
  return r.value;
}

}  // namespace

TEST_CASE("cross_ratio arithmetic") {
  CHECK(value(cross_ratio({HomPoint{0, 1}, HomPoint{1, 0}, HomPoint{1, 1}, HomPoint{-1, 1}})) ==
        doctest::Approx(-1.0));
  CHECK(value(cross_ratio({HomPoint{0, 1}, HomPoint{1, 1}, HomPoint{2, 1}, HomPoint{3, 1}})) ==
        doctest::Approx(4.0 / 3));
  CHECK(cross_ratio({HomPoint{0, 1}, HomPoint{1, 1}, HomPoint{1, 1}, HomPoint{3, 1}}).infinite);
  CHECK_THROWS_AS(cross_ratio({HomPoint{0, 1}, HomPoint{0, 1}, HomPoint{0, 1}, HomPoint{3, 1}}),
                  Error);
}

TEST_CASE("tangent lines of the prenormal form") {
  const auto t = flecnodal_tangent_lines(PrenormalForm{1, 1, 2, 2}.jet());
  CHECK(t.flec_right.A == doctest::Approx(4.0));
  CHECK(t.flec_right.B == doctest::Approx(2.0));
  CHECK(t.flec_left.A == doctest::Approx(2.0));
  CHECK(t.flec_left.B == doctest::Approx(4.0));
  // Transversal x-coordinates (-2, inf, -1/2, 0) give 3/4.
  CHECK(on_transversal(t.flec_left).num / on_transversal(t.flec_left).den == doctest::Approx(-2));
  CHECK(on_transversal(t.right).den == 0.0);
  CHECK(value(cross_ratio(t)) == doctest::Approx(0.75).epsilon(1e-15));

  // a = b = 0: L_Fr is the y axis, rho = 1.
  const auto t0 = flecnodal_tangent_lines(PrenormalForm{0, 0, 2, 3}.jet());
  CHECK(t0.flec_right.B == 0.0);
  CHECK(value(cross_ratio(t0)) == doctest::Approx(1.0));
  // I = 0: L_Fr is the x axis, rho infinite.
  const auto ti = flecnodal_tangent_lines(PrenormalForm{1, 1, 0, 2}.jet());
  CHECK(ti.flec_right.A == 0.0);
  CHECK(cross_ratio(ti).infinite);

  CHECK_THROWS_AS(flecnodal_tangent_lines(make({{1, 1, 1.0}, {3, 0, 1.0}})), Error);
}

TEST_CASE("rho of prenormal forms") {
  CHECK(value(rho_hyperbonode(PrenormalForm{1, 1, 2, 2}.jet(), {0, 0})) ==
        doctest::Approx(0.75).epsilon(1e-15));
  CHECK(std::abs(value(rho_hyperbonode(PrenormalForm{1, 1, 1, 1}.jet(), {0, 0}))) < 1e-15);
  CHECK(rho_hyperbonode(PrenormalForm{1, 1, 0, 2}.jet(), {0, 0}).infinite);
  CHECK_THROWS_AS(rho_hyperbonode(make({{1, 1, 1.0}, {3, 0, 1.0}}), {0, 0}), Error);
}

TEST_CASE("prenormal relation and the orientation identity") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int n = 0;
  while (n < 200) {
    const PrenormalForm h{u(rng), u(rng), u(rng), u(rng)};
    if (std::abs(h.I * h.J) <= 0.05) continue;
    ++n;
    const double rho = value(rho_hyperbonode(h.jet(), {0, 0}));
    CHECK(std::abs(rho - (1 - h.a * h.b / (h.I * h.J))) <= 1e-9 * std::max(1.0, std::abs(rho)));
    const auto t = flecnodal_tangent_lines(h.jet());
    const ExtendedReal r1 = cross_ratio(t);
    const ExtendedReal r2 = cross_ratio({on_transversal(t.flec_right), on_transversal(t.left),
                                         on_transversal(t.flec_left), on_transversal(t.right)});
    CHECK(r1.value == r2.value);
  }
}

TEST_CASE("formula agrees with the geometric cross-ratio on adapted jets") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 200; ++k) {
    const MongeJet f = random_adapted(rng);
    const JetSample s = f.sample(0, 0);
    if (std::abs(s(4, 0) * s(0, 4)) < 1e-3) continue;
    const double a = value(rho_formula_axes(s));
    const double b = value(cross_ratio(flecnodal_tangent_lines(f)));
    CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("sign criterion: separating pairs give negative rho") {
  // Lines through the origin meeting y = 1 at x: A = 1, B = -x. L_r is the
  // x axis (point at infinity), L_l the y axis (x = 0).
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int neg = 0, pos = 0;
  for (int k = 0; k < 200; ++k) {
    const double fl = u(rng), fr = u(rng);
    const TangentLineSet t{{1, -fl}, {0, 1}, {1, -fr}, {1, 0}};
    // {F_l, inf} cuts the line into (fl, inf) and (-inf, fl).
    const bool separated = (fr > fl) != (0.0 > fl);
    const double rho = value(cross_ratio(t));
    CHECK((rho < 0) == separated);
    (separated ? neg : pos) += 1;
  }
  CHECK(neg > 20);
  CHECK(pos > 20);
}

TEST_CASE("parity and index on prenormal forms") {
  CHECK(parity(PrenormalForm{1, 1, 2, 2}.jet(), {0, 0}) == 1);
  CHECK(parity(PrenormalForm{1, 1, 2, -2}.jet(), {0, 0}) == -1);
  try {
    parity(PrenormalForm{1, 1, 0, 2}.jet(), {0, 0});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::biflecnode_degenerate);
  }
  CHECK(index_hyperbonode(PrenormalForm{1, 1, 2, 2}.jet(), {0, 0}) == 1);
  CHECK(index_hyperbonode(PrenormalForm{1, 1, 2, -2}.jet(), {0, 0}) == -1);
  CHECK(index_hyperbonode(PrenormalForm{-1, 1, 1, 1}.jet(), {0, 0}) == 1);
  CHECK_THROWS_AS(index_hyperbonode(PrenormalForm{1, 1, 1, 1}.jet(), {0, 0}), Error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 300; ++k) {
    const PrenormalForm h{u(rng), u(rng), u(rng), u(rng)};
    if (std::abs(h.I * h.J - h.a * h.b) <= 1e-6 || std::abs(h.I * h.J) < 1e-3) continue;
    const double rho = 1 - h.a * h.b / (h.I * h.J);
    if (std::abs(rho) < 1e-6) continue;
    CHECK(index_hyperbonode(h.jet(), {0, 0}) == sign_of(h.I * h.J - h.a * h.b));
  }
}

TEST_CASE("kill_cubic") {
  const MongeJet zero = make({{2, 0, 1.0}, {0, 2, 1.0}, {4, 0, 0.3}});
  const CubicRemoval z = kill_cubic(zero, QuadraticKind::elliptic);
  CHECK(z.alpha == 0.0);
  CHECK(z.beta == 0.0);
  CHECK(z.jet == zero);

  const MongeJet divisible = make({{2, 0, 1.0}, {0, 2, 1.0}, {3, 0, 1.0}, {1, 2, 1.0}});
  const CubicRemoval d = kill_cubic(divisible, QuadraticKind::elliptic);
  CHECK(d.alpha == doctest::Approx(1.0));
  CHECK(d.beta == doctest::Approx(0.0));
  for (int j = 0; j <= 3; ++j) CHECK(std::abs(d.jet.coefficient(3 - j, j)) <= 1e-10);
  CHECK(d.jet.coefficient(2, 0) == doctest::Approx(1.0));
  CHECK(d.jet.coefficient(0, 2) == doctest::Approx(1.0));
  // Series oracle: the projective map leaves no cubic before snapping.
  const MongeJet raw = project_regraph(divisible, ProjectiveMap::cubic_shift(1.0, 0.0));
  for (int j = 0; j <= 3; ++j) CHECK(std::abs(raw.coefficient(3 - j, j)) <= 1e-12);

  try {
    kill_cubic(make({{2, 0, 1.0}, {0, 2, 1.0}, {3, 0, 1.0}}), QuadraticKind::elliptic);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_a_node);
  }

  const MongeJet hyp = make({{2, 0, 1.0}, {0, 2, -1.0}, {2, 1, 0.5}, {0, 3, -0.5}});
  const CubicRemoval hk = kill_cubic(hyp, QuadraticKind::hyperbolic);
  CHECK(hk.beta == doctest::Approx(0.5));
}

TEST_CASE("diagonal formula examples and agreement with the axes formula") {
  JetSample s;
  s.f[JetSample::index(4, 0)] = 1;
  s.f[JetSample::index(0, 4)] = 1;
  CHECK(value(rho_formula_diagonal(s)) == doctest::Approx(1.0));
  JetSample t;
  t.f[JetSample::index(2, 2)] = 1;
  CHECK(value(rho_formula_diagonal(t)) == doctest::Approx(1.0));

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int n = 0;
  while (n < 100) {
    const PrenormalForm h{u(rng), u(rng), u(rng), u(rng)};
    if (std::abs(h.I * h.J) <= 0.05) continue;
    ++n;
    const double a = value(rho_hyperbonode(h.jet(), {0, 0}));
    const ExtendedReal b = rho_hyperbonode_diagonal(h.jet(), {0, 0});
    if (b.infinite) continue;
    CHECK(std::abs(a - b.value) <= 1e-7 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("ellipnode formula worked values") {
  const MongeJet e1 = make({{2, 0, 0.5}, {0, 2, 0.5}, {4, 0, 1.0 / 24}, {0, 4, 1.0 / 24}});
  CHECK(std::abs(rho_ellipnode(e1, {0, 0}) - 1.0) <= 1e-12);
  CHECK(std::abs(rho_ellipnode_oracle(e1) - 1.0) <= 1e-12);
  const MongeJet e2 =
      make({{2, 0, 0.5}, {0, 2, 0.5}, {4, 0, 1.0 / 24}, {0, 4, 1.0 / 24}, {3, 1, 1.0 / 6}});
  CHECK(std::abs(rho_ellipnode(e2, {0, 0}) - 0.8) <= 1e-12);
  CHECK(std::abs(rho_ellipnode_oracle(e2) - 0.8) <= 1e-12);
  CHECK(std::abs(oracle::ellipnode_cross_ratio(e2) - 0.8) <= 1e-12);

  const MongeJet bad =
      make({{2, 0, 0.5}, {0, 2, 0.5}, {4, 0, 3.0 / 24}, {2, 2, 1.0 / 4}, {0, 4, 3.0 / 24}});
  try {
    rho_ellipnode(bad, {0, 0});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::non_generic);
  }
}

TEST_CASE("elliptic formula against both complex cross-ratios") {
  std::mt19937_64 rng(6);
  int n = 0;
  for (int k = 0; k < 300 && n < 100; ++k) {
    const MongeJet f = random_normalized_elliptic(rng);
    double formula;
    try {
      formula = rho_formula_elliptic(f.sample(0, 0));
    } catch (const Error&) {
      continue;
    }
    ++n;
    const std::complex<double> lib = ellipnode_cross_ratio(f);
    const std::complex<double> ref = oracle::ellipnode_cross_ratio(f);
    const double sc = std::max(1.0, std::abs(formula));
    CHECK(std::abs(lib.imag()) <= 1e-10 * sc);
    CHECK(std::abs(lib.real() - formula) <= 1e-9 * sc);
    CHECK(std::abs(ref - formula) <= 1e-9 * sc);
  }
  CHECK(n == 100);
}

TEST_CASE("normalization of a general elliptic node") {
  // (x^2+y^2)/2 + quartic, then an affine change and a cubic multiple of Q.
  const MongeJet base = make({{2, 0, 0.5}, {0, 2, 0.5}, {4, 0, 1.0 / 24}, {0, 4, 1.0 / 24}, {3, 1, 1.0 / 6}});
  const MongeJet sheared = linear_change(base, Mat2{1.3, 0.4, -0.2, 0.9}, -2.0);
  const MongeJet with_cubic = project_regraph(sheared, ProjectiveMap::cubic_shift(0.3, -0.7));
  CHECK(rho_ellipnode(with_cubic, {0, 0}) == doctest::Approx(0.8).epsilon(1e-9));
}
