#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "projumb/error.hpp"
#include "projumb/invariants.hpp"
#include "projumb/nodes.hpp"

using namespace projumb;

namespace {

MongeJet make(std::initializer_list<JetTerm> terms, int degree = 5) {
  return MongeJet::from_terms(std::span<const JetTerm>(terms.begin(), terms.size()), degree);
}

MongeJet disc_surface() { return make({{1, 1, 1.0}, {4, 0, 1.0}, {2, 2, 2.0}, {0, 4, 1.0}}); }

// Cubic form of f at (x, y) along angle t.
double cubic_form(const MongeJet& f, double x, double y, double t) {
  const double c = std::cos(t), s = std::sin(t);
  return f.partial(3, 0, x, y) * c * c * c + 3 * f.partial(2, 1, x, y) * c * c * s +
         3 * f.partial(1, 2, x, y) * c * s * s + f.partial(0, 3, x, y) * s * s * s;
}

// Both asymptotic directions at p are flecnodal (oracle: angle Newton).
bool both_flecnodal(const MongeJet& f, Point2 p, double tol) {
  int hits = 0;
  for (double t0 : {0.1, 0.1 + M_PI / 2}) {
    const auto t = oracle::asymptotic_angle(f, p.x, p.y, t0);
    if (!t) return false;
    if (std::abs(cubic_form(f, p.x, p.y, *t)) <= tol) ++hits;
  }
  return hits == 2;
}

}  // namespace

TEST_CASE("a generic prenormal form has one hyperbonode at the origin") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int n = 0;
  while (n < 20) {
    const PrenormalForm h{u(rng), u(rng), u(rng), u(rng)};
    const double rho = 1 - h.a * h.b / (h.I * h.J);
    if (std::abs(h.I * h.J) < 0.1 || std::abs(rho) < 0.05 || std::abs(rho) > 20) continue;
    ++n;
    const auto nodes = find_hyperbonodes(h.jet(), Window{-0.3, 0.3, -0.3, 0.3}, 64);
    REQUIRE(nodes.size() == 1);
    CHECK(norm(nodes[0].position) <= 1e-10);
    CHECK(nodes[0].rho.value == doctest::Approx(rho).epsilon(1e-9));
    CHECK(nodes[0].index == sign_of(h.I * h.J - h.a * h.b));
    CHECK(nodes[0].index == nodes[0].parity * sign_of(nodes[0].rho.value));
  }
}

TEST_CASE("disc surface: index sum one") {
  const MongeJet f = disc_surface();
  const auto nodes = find_hyperbonodes(f, Window{-2, 2, -2, 2}, 256);
  REQUIRE_FALSE(nodes.empty());
  int sum = 0;
  for (const NodeRecord& n : nodes) {
    sum += n.index;
    CHECK(n.kind == NodeKind::hyperbonode);
    CHECK(n.residual <= 1e-10);
    CHECK(both_flecnodal(f, n.position, 1e-9));
    const AdaptedChart c = adapted_chart(f, n.position.x, n.position.y, ChartMode::axes);
    CHECK(std::abs(c.jet.coefficient(3, 0)) + std::abs(c.jet.coefficient(0, 3)) <= 1e-8);
  }
  CHECK(sum == 1);
}

TEST_CASE("no nodes") {
  CHECK(find_hyperbonodes(make({{1, 1, 1.0}}), Window{}, 32).empty());
  CHECK(find_ellipnodes(make({{1, 1, 1.0}}), Window{}, 32).empty());
  CHECK(find_ellipnodes(make({{2, 0, 0.5}, {0, 2, 0.5}, {3, 0, 1.0 / 6}}), Window{-0.5, 0.5, -0.5, 0.5}, 32)
            .empty());
}

TEST_CASE("ellipnode examples") {
  const Window w{-0.5, 0.5, -0.5, 0.5};
  const MongeJet e1 = make({{2, 0, 0.5}, {0, 2, 0.5}, {4, 0, 1.0 / 24}, {0, 4, 1.0 / 24}});
  const auto n1 = find_ellipnodes(e1, w, 64);
  REQUIRE(n1.size() == 1);
  CHECK(norm(n1[0].position) <= 1e-10);
  CHECK(n1[0].rho.value == doctest::Approx(1.0));
  CHECK(n1[0].index == 1);

  const MongeJet e2 =
      make({{2, 0, 0.5}, {0, 2, 0.5}, {4, 0, 1.0 / 24}, {0, 4, 1.0 / 24}, {3, 1, 1.0 / 6}});
  const auto n2 = find_ellipnodes(e2, w, 64);
  REQUIRE(n2.size() == 1);
  CHECK(n2[0].residual <= 1e-10);
  CHECK(n2[0].rho.value == doctest::Approx(0.8));
  // Oracle: the complex flecnodal value vanishes at the node.
  CHECK(std::abs(oracle::ellipnode_cross_ratio(e2) - 0.8) <= 1e-12);
}

TEST_CASE("ellipnode pair of opposite signs") {
  // x^4/24 + y^5/120 - 0.03 y^3/6: nodes on the y axis where y^2 = 0.06.
  const MongeJet f = make({{2, 0, 0.5}, {0, 2, 0.5}, {4, 0, 1.0 / 24}, {0, 5, 1.0 / 120}, {0, 3, -0.005}});
  const auto nodes = find_ellipnodes(f, Window{-0.5, 0.5, -0.5, 0.5}, 64);
  REQUIRE(nodes.size() == 2);
  CHECK(nodes[0].index == -nodes[1].index);
  for (const NodeRecord& n : nodes) {
    CHECK(std::abs(n.position.x) <= 1e-10);
    CHECK(std::abs(n.position.y) == doctest::Approx(std::sqrt(0.06)).epsilon(1e-6));
    // Oracle: complex flecnodal condition by the angle-free formula.
    const double x = n.position.x, y = n.position.y;
    const double b = f.partial(1, 1, x, y), c = f.partial(0, 2, x, y), a = f.partial(2, 0, x, y);
    const std::complex<double> slope = (-b + std::sqrt(std::complex<double>(b * b - a * c))) / c;
    const std::complex<double> I = f.partial(3, 0, x, y) + 3.0 * f.partial(2, 1, x, y) * slope +
                                   3.0 * f.partial(1, 2, x, y) * slope * slope +
                                   f.partial(0, 3, x, y) * slope * slope * slope;
    CHECK(std::abs(I) <= 1e-9);
  }
}

TEST_CASE("refine_node") {
  const MongeJet h = PrenormalForm{1, 1, 2, 2}.jet();
  const NodeRecord n = refine_node(h, {1e-3, -2e-3}, NodeKind::hyperbonode);
  CHECK(norm(n.position) <= 1e-10);
  CHECK(n.iterations <= 8);
  CHECK(refine_node(h, {0, 0}, NodeKind::hyperbonode).iterations == 0);
  try {
    refine_node(make({{2, 0, 0.5}, {0, 2, 0.5}}), {0.1, 0.1}, NodeKind::hyperbonode);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::refinement);
  }
  CHECK_THROWS_AS(refine_node(h, {0, 0}, NodeKind::ellipnode), Error);
}

TEST_CASE("node sets are stable under grid doubling") {
  const MongeJet f = make({{1, 1, 1.0}, {4, 0, 1.0}, {3, 1, 0.4}, {2, 2, 2.0}, {0, 4, 1.0}, {2, 1, 0.2}});
  const Window w{-2, 2, -2, 2};
  const auto a = find_hyperbonodes(f, w, 128), b = find_hyperbonodes(f, w, 256);
  REQUIRE(a.size() == b.size());
  REQUIRE_FALSE(a.empty());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(distance(a[k].position, b[k].position) <= 1e-9);
}

TEST_CASE("x-y symmetric jets have mirrored nodes with equal rho") {
  const MongeJet f = make({{1, 1, 1.0}, {4, 0, 1.0}, {3, 1, 0.3}, {1, 3, 0.3}, {2, 2, 1.5}, {0, 4, 1.0},
                           {2, 1, 0.25}, {1, 2, 0.25}});
  const auto nodes = find_hyperbonodes(f, Window{-2, 2, -2, 2}, 256);
  REQUIRE_FALSE(nodes.empty());
  for (const NodeRecord& n : nodes) {
    const Point2 m{n.position.y, n.position.x};
    bool found = false;
    for (const NodeRecord& o : nodes)
      if (distance(o.position, m) <= 1e-8) {
        found = true;
        CHECK(o.rho.value == doctest::Approx(n.rho.value).epsilon(1e-8));
      }
    CHECK(found);
  }
}
