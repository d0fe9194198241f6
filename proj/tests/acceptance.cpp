// Acceptance run: one line per criterion, nonzero exit when any fails.
// Reference values come from closed forms and from the oracles in
// oracles.hpp, never from the library's own cross-checks.

#include <array>
#include <chrono>
#include <complex>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>

#include "oracles.hpp"
#include "projumb/curve_tracing.hpp"
#include "projumb/error.hpp"
#include "projumb/family_sweep.hpp"
#include "projumb/invariants.hpp"
#include "projumb/local_geometry.hpp"
#include "projumb/nodes.hpp"

using namespace projumb;

namespace {

using Terms = std::map<std::pair<int, int>, std::vector<double>>;
using Rng = std::mt19937_64;
using C = std::complex<double>;

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double U(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double closed_rho(const PrenormalForm& h) { return 1 - h.a * h.b / (h.I * h.J); }

PrenormalForm random_prenormal(Rng& rng, double max_rho = 50) {
  for (;;) {
    const PrenormalForm h{U(rng, -2, 2), U(rng, -2, 2), U(rng, -2, 2), U(rng, -2, 2)};
    if (std::abs(h.I * h.J) > 0.05 && std::abs(closed_rho(h)) < max_rho && std::abs(closed_rho(h)) > 0.01)
      return h;
  }
}

// Partial derivative of the polynomial at a complex point.
C partial(const MongeJet& f, int a, int b, C x, C y) {
  C sum = 0;
  for (const auto& [ij, c] : f.terms()) {
    const auto [m, n] = ij;
    if (m < a || n < b) continue;
    double k = c;
    for (int r = 0; r < a; ++r) k *= m - r;
    for (int r = 0; r < b; ++r) k *= n - r;
    sum += k * std::pow(x, m - a) * std::pow(y, n - b);
  }
  return sum;
}

// Flecnodal function of the asymptotic field near the x-axis (swap = false)
// or the y-axis (swap = true), at a complex point.
C flec_function(const MongeJet& f, C x, C y, bool swap) {
  auto d = [&](int a, int b) { return swap ? partial(f, b, a, x, y) : partial(f, a, b, x, y); };
  const C A = d(2, 0), B = d(1, 1), Cc = d(0, 2);
  const C root = std::sqrt(B * B - A * Cc);
  const C p = -A / (B + (B.real() >= 0 ? root : -root));
  return d(3, 0) + 3. * d(2, 1) * p + 3. * d(1, 2) * p * p + d(0, 3) * p * p * p;
}

// Tangent direction at the origin of the flecnodal curve, by complex-step
// differentiation.
std::array<double, 2> flec_tangent(const MongeJet& f, bool swap) {
  const double h = 1e-20;
  const double gx = flec_function(f, C(0, h), 0, swap).imag() / h;
  const double gy = flec_function(f, 0, C(0, h), swap).imag() / h;
  return {-gy, gx};
}

double det2(const std::array<double, 2>& u, const std::array<double, 2>& v) { return u[0] * v[1] - u[1] * v[0]; }

// Cross-ratio of (T_x, L_y, T_y, L_x) for lines through the origin.
double line_cross_ratio(const MongeJet& f) {
  const std::array<double, 2> tx = flec_tangent(f, false), ty = flec_tangent(f, true);
  const std::array<double, 2> lx{1, 0}, ly{0, 1};
  return det2(tx, ty) * det2(ly, lx) / (det2(tx, lx) * det2(ly, ty));
}

MongeJet disguised(Rng& rng, const PrenormalForm& h) {
  Poly2 p = h.jet().polynomial();
  for (int j = 0; j <= 5; ++j) p.set(5 - j, j, U(rng, -1, 1) / 60);
  Mat2 m;
  do {
    m = Mat2{1 + U(rng, -0.5, 0.5), U(rng, -0.5, 0.5), U(rng, -0.5, 0.5), 1 + U(rng, -0.5, 0.5)};
  } while (std::abs(m.det()) < 0.2);
  const double zs = (U(rng, -1, 1) > 0 ? 1 : -1) * U(rng, 0.5, 2.0);
  return project_regraph(linear_change(MongeJet(p, 5), m, zs),
                         ProjectiveMap::cubic_shift(U(rng, -1, 1), U(rng, -1, 1)));
}

ProjectiveMap random_projective(Rng& rng) {
  for (;;) {
    ProjectiveMap::Matrix m{};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m[r][c] = (r == c ? 1.0 : 0.0) + U(rng, -0.4, 0.4);
    for (int c = 0; c < 3; ++c) m[3][c] = U(rng, -1, 1);
    m[3][3] = 1.0;
    if (std::abs(m[0][0] * m[1][1] - m[0][1] * m[1][0]) < 0.2) continue;
    try {
      return ProjectiveMap(m);
    } catch (const Error&) {
    }
  }
}

MongeJet random_normalized_elliptic(Rng& rng) {
  Poly2 p(5);
  p.set(2, 0, 0.5);
  p.set(0, 2, 0.5);
  for (int d = 4; d <= 5; ++d)
    for (int j = 0; j <= d; ++j) p.set(d - j, j, U(rng, -2, 2) / 24);
  return MongeJet(p, 5);
}

double oracle_elliptic_rho(const MongeJet& f) { return oracle::ellipnode_cross_ratio(f).real(); }

Outcome c1_prenormal_relation() {
  Rng rng(1);
  double worst = 0;
  for (int k = 0; k < 500; ++k) {
    const PrenormalForm h = random_prenormal(rng, 1e6);
    const ExtendedReal r = rho_hyperbonode(h.jet(), {0, 0});
    if (r.infinite) return {false, "infinite rho"};
    worst = std::max(worst, std::abs(r.value - closed_rho(h)));
  }
  return {worst <= 1e-9, fmt("500 prenormal forms, max |rho - (1 - ab/IJ)| = %.3g", worst)};
}

Outcome c2_formula_vs_lines() {
  Rng rng(2);
  double worst = 0;
  int n = 0;
  while (n < 200) {
    Poly2 p(5);
    p.set(1, 1, std::abs(U(rng, -2, 2)) + 0.1);
    p.set(2, 1, U(rng, -1, 1));
    p.set(1, 2, U(rng, -1, 1));
    for (int j = 0; j <= 4; ++j) p.set(4 - j, j, U(rng, -2, 2) / 24);
    for (int j = 0; j <= 5; ++j) p.set(5 - j, j, U(rng, -2, 2) / 120);
    const MongeJet f(p, 5);
    const JetSample s = f.sample(0, 0);
    if (std::abs(s(4, 0) * s(0, 4)) < 1e-3) continue;
    const double want = line_cross_ratio(f);
    if (!std::isfinite(want) || std::abs(want) > 1e6) continue;
    ++n;
    const ExtendedReal got = rho_formula_axes(s);
    if (got.infinite) return {false, "formula infinite at a finite cross-ratio"};
    worst = std::max(worst, rel(got.value, want));
  }
  return {worst <= 1e-8, fmt("200 adapted jets against complex-step tangent lines, max relative gap %.3g", worst)};
}

Outcome c3_diagonal_formula() {
  Rng rng(3);
  double worst = 0;
  for (int n = 0; n < 200; ++n) {
    const PrenormalForm h = random_prenormal(rng);
    const ExtendedReal d = rho_hyperbonode_diagonal(disguised(rng, h), {0, 0});
    if (d.infinite) return {false, "infinite rho"};
    worst = std::max(worst, rel(d.value, closed_rho(h)));
  }
  return {worst <= 1e-7, fmt("200 disguised prenormal forms, max relative gap to 1 - ab/IJ %.3g", worst)};
}

Outcome c4_index() {
  Rng rng(4);
  int n = 0, bad = 0;
  while (n < 500) {
    const PrenormalForm h{U(rng, -2, 2), U(rng, -2, 2), U(rng, -2, 2), U(rng, -2, 2)};
    if (std::abs(h.I * h.J - h.a * h.b) <= 1e-6) continue;
    ++n;
    const int want = sign_of(h.I * h.J - h.a * h.b);
    int axes = 0, diag = 0;
    try {
      axes = index_hyperbonode(h.jet(), {0, 0});
      const AdaptedChart dg = adapted_chart(h.jet(), 0, 0, ChartMode::diagonals);
      diag = index_expression_diagonal(kill_cubic(dg.jet, QuadraticKind::hyperbolic, 1e-6).jet.sample(0, 0));
    } catch (const Error&) {
    }
    bad += axes != want || diag != want;
  }
  return {bad == 0, fmt("500 prenormal forms, %.0f disagreements with sign(IJ - ab)", bad)};
}

Outcome c5_ellipnode() {
  Rng rng(5);
  double worst = 0;
  int n = 0;
  while (n < 200) {
    const MongeJet f = random_normalized_elliptic(rng);
    const std::complex<double> cr = oracle::ellipnode_cross_ratio(f);
    if (std::abs(cr.real()) > 1e6) continue;
    ++n;
    worst = std::max({worst, rel(rho_ellipnode(f, {0, 0}), cr.real()), std::abs(cr.imag())});
  }
  const JetTerm t1[] = {{2, 0, 0.5}, {0, 2, 0.5}, {4, 0, 1.0 / 24}, {0, 4, 1.0 / 24}};
  const JetTerm t2[] = {{2, 0, 0.5}, {0, 2, 0.5}, {4, 0, 1.0 / 24}, {0, 4, 1.0 / 24}, {3, 1, 1.0 / 6}};
  const double w1 = std::abs(rho_ellipnode(MongeJet::from_terms(t1), {0, 0}) - 1.0);
  const double w2 = std::abs(rho_ellipnode(MongeJet::from_terms(t2), {0, 0}) - 0.8);
  return {worst <= 1e-9 && w1 <= 1e-12 && w2 <= 1e-12,
          fmt("200 jets vs complex cross-ratio, max gap %.3g; worked values off by %.3g and %.3g", worst, w1, w2)};
}

// Winding number of a closed polyline around q.
int winding(const Polyline& pl, Point2 q) {
  double total = 0;
  const std::size_t n = pl.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = pl.vertices[i].pos, b = pl.vertices[(i + 1) % n].pos;
    total += std::atan2((a.x - q.x) * (b.y - q.y) - (a.y - q.y) * (b.x - q.x),
                        (a.x - q.x) * (b.x - q.x) + (a.y - q.y) * (b.y - q.y));
  }
  return static_cast<int>(std::lround(total / (2 * M_PI)));
}

bool proper_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
  auto orient = [](Point2 p, Point2 q, Point2 r) { return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x); };
  const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

Outcome c6_disc() {
  const JetTerm terms[] = {{1, 1, 1.0}, {4, 0, 1.0}, {2, 2, 2.0}, {0, 4, 1.0}};
  const MongeJet f = MongeJet::from_terms(terms);
  const Window w{-2, 2, -2, 2};
  const TracedCurve par = trace_parabolic(f, w, 512);
  if (par.segments.size() != 1 || !par.segments[0].closed)
    return {false, fmt("%.0f parabolic polylines", par.segments.size())};
  const Polyline& pl = par.segments[0];
  const std::size_t n = pl.vertices.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j)
      if (!(i == 0 && j == n - 1) &&
          proper_cross(pl.vertices[i].pos, pl.vertices[i + 1].pos, pl.vertices[j].pos, pl.vertices[(j + 1) % n].pos))
        return {false, "parabolic polyline self-intersects"};
  double off = 0;
  for (const CurveVertex& v : pl.vertices) off = std::max(off, std::abs(oracle::discriminant(f, v.pos.x, v.pos.y)));
  if (std::abs(winding(pl, {0, 0})) != 1 || winding(pl, {1.9, 1.9}) != 0)
    return {false, "origin not enclosed by the parabolic curve"};
  if (oracle::discriminant(f, 0, 0) <= 0) return {false, "enclosed region is not hyperbolic"};
  int sum = 0, count = 0;
  for (const NodeRecord& node : find_hyperbonodes(f, w, 512))
    if (winding(pl, node.position) != 0) {
      sum += node.index;
      ++count;
    }
  return {sum == 1 && off < 1e-8,
          fmt("simple closed parabolic curve (max |disc| %.2g) around a hyperbolic disc, %.0f hyperbonodes inside, "
              "index sum %.0f",
              off, count, sum)};
}

const Transition* first_of(const SweepReport& r, TransitionKind k) {
  for (const Transition& t : r.transitions)
    if (t.kind == k) return &t;
  return nullptr;
}

SweepOptions options(Window w, int grid, double t0, double t1, int steps) {
  SweepOptions o;
  o.window = w;
  o.grid = grid;
  o.t0 = t0;
  o.t1 = t1;
  o.steps = steps;
  return o;
}

const NodeRecord* at_origin(const std::vector<NodeRecord>& nodes) {
  for (const NodeRecord& n : nodes)
    if (norm(n.position) < 1e-8) return &n;
  return nullptr;
}

Outcome c7_double_hyperbonode() {
  // a = t, b = 1, I = J = 1: rho at the origin is 1 - t.
  const FamilyJet fam(Terms{{{1, 1}, {1}}, {{3, 1}, {0, 1.0 / 6}}, {{1, 3}, {1.0 / 6}}, {{4, 0}, {1.0 / 24}},
                            {{0, 4}, {1.0 / 24}}},
                      5);
  const SweepReport r = sweep(fam, options({-1, 1, -1, 1}, 128, 0.5, 1.5, 200));
  double worst = 0;
  for (const SweepSample& s : r.samples) {
    const NodeRecord* o = at_origin(s.hyperbonodes);
    if (!o) return {false, fmt("origin node missing at t = %.6g", s.t)};
    if (o->flags.any()) continue;
    worst = std::max(worst, std::abs(o->rho.value - (1 - s.t)));
    if (o->index != sign_of(1 - s.t)) return {false, fmt("origin index wrong at t = %.6g", s.t)};
  }
  const Transition* tr = first_of(r, TransitionKind::creation_annihilation);
  if (!tr || std::abs(tr->t_lo - 1) > 1e-3 || std::abs(tr->t_hi - 1) > 1e-3)
    return {false, "no creation-annihilation event within 1e-3 of t = 1"};
  int id = -1;
  for (const ComponentSummary& c : r.samples.front().components)
    if (c.kind == PointKind::hyperbolic) id = c.id;
  const IndexSumSeries s = index_sum(r, id);
  for (int k = 0; k < static_cast<int>(s.sums.size()); ++k)
    if ((k <= tr->sample_lo || k >= tr->sample_hi) && s.sums[k] != s.sums.front())
      return {false, fmt("index sum changes at t = %.6g", r.samples[k].t)};
  const std::size_t before = r.samples[tr->sample_lo].hyperbonodes.size();
  const std::size_t after = r.samples[tr->sample_hi].hyperbonodes.size();
  const bool pair = before == after + 2 || after == before + 2 || before == after;
  return {worst <= 1e-8 && pair,
          fmt("event in [%.9g, %.9g]; origin rho vs 1 - t max gap %.3g; index sum constant outside the bracket",
              tr->t_lo, tr->t_hi, worst)};
}

Outcome c8_flec() {
  // a = b = J = 1, I = t: rho at the origin is 1 - 1/t.
  const FamilyJet fam(Terms{{{1, 1}, {1}}, {{3, 1}, {1.0 / 6}}, {{1, 3}, {1.0 / 6}}, {{4, 0}, {0, 1.0 / 24}},
                            {{0, 4}, {1.0 / 24}}},
                      5);
  const SweepReport r = sweep(fam, options({-0.5, 0.5, -0.5, 0.5}, 64, -0.5, 0.5, 101));
  double worst = 0;
  bool infinite_at_zero = false;
  for (const SweepSample& s : r.samples) {
    if (s.hyperbonodes.size() != 1) return {false, fmt("%.0f hyperbonodes at t = %.6g", s.hyperbonodes.size(), s.t)};
    const NodeRecord* o = at_origin(s.hyperbonodes);
    if (!o) return {false, fmt("origin node missing at t = %.6g", s.t)};
    if (o->index != -1) return {false, fmt("origin index %.0f at t = %.6g, want sign(t - 1)", o->index, s.t)};
    if (std::abs(s.t) < 1e-12) {
      infinite_at_zero = o->rho.infinite;
      continue;
    }
    if (std::abs(s.t) > 0.02) worst = std::max(worst, rel(o->rho.value, 1 - 1 / s.t));
  }
  const Transition* tr = first_of(r, TransitionKind::flec_hyperbonode);
  const bool located = tr && std::abs(tr->t_lo) <= 1e-3 && std::abs(tr->t_hi) <= 1e-3;
  const bool spurious = first_of(r, TransitionKind::creation_annihilation) != nullptr;
  return {located && !spurious && infinite_at_zero && worst <= 1e-8,
          std::string("flec event near t = 0: ") + (located ? "yes" : "no") +
              fmt("; rho vs 1 - 1/t max relative gap %.3g; infinite at t = 0: ", worst) +
              (infinite_at_zero ? "yes" : "no")};
}

Outcome c9_ellipnodes() {
  const FamilyJet persistent(Terms{{{2, 0}, {0.5}}, {{0, 2}, {0.5}}, {{4, 0}, {1.0 / 24}}, {{0, 4}, {1.0 / 24}},
                                   {{3, 1}, {0, 1.0 / 6}}},
                             5);
  SweepOptions o = options({-0.5, 0.5, -0.5, 0.5}, 48, 0.0, 1.0, 100);
  o.hyperbonodes = false;
  const SweepReport a = sweep(persistent, o);
  double worst = 0;
  for (const SweepSample& s : a.samples) {
    const NodeRecord* n = at_origin(s.ellipnodes);
    if (!n) return {false, fmt("origin ellipnode missing at t = %.6g", s.t)};
    const double want = oracle_elliptic_rho(persistent.at(s.t));
    worst = std::max(worst, rel(n->rho.value, want));
    if (n->index != sign_of(want)) return {false, fmt("origin index wrong at t = %.6g", s.t)};
  }
  const IndexSumSeries sa = index_sum(a, 0);
  for (int v : sa.sums)
    if (v != sa.sums.front()) return {false, "sign sum changes along the persistent family"};

  const FamilyJet dbl(Terms{{{2, 0}, {0.5}}, {{0, 2}, {0.5}}, {{4, 0}, {1.0 / 24}}, {{0, 5}, {1.0 / 120}},
                            {{0, 3}, {0, 1.0 / 6}}},
                      5);
  const double rho0 = oracle_elliptic_rho(dbl.at(0));
  SweepOptions od = options({-0.5, 0.5, -0.5, 0.5}, 48, -0.05, 0.05, 20);
  od.hyperbonodes = false;
  const SweepReport b = sweep(dbl, od);
  int neg = 0, pos = 0;
  for (const SweepSample& s : b.samples) {
    const auto& e = s.ellipnodes;
    if (e.size() == 2 && e[0].index + e[1].index == 0 && e[0].index != 0)
      ++(s.t < 0 ? neg : pos);
    else if (!e.empty())
      return {false, fmt("%.0f ellipnodes at t = %.6g", e.size(), s.t)};
  }
  const bool ok = worst <= 1e-8 && std::abs(rho0) < 1e-12 && (neg > 0) != (pos > 0) &&
                  first_of(b, TransitionKind::double_ellipnode) != nullptr;
  return {ok, fmt("persistent: rho vs complex cross-ratio max gap %.3g; double: oracle rho(0) = %.2g, pair on "
                  "one side (%.0f samples)",
                  worst, rho0, neg + pos)};
}

Outcome c10_projective() {
  Rng rng(10);
  double worst = 0;
  int index_bad = 0;
  for (int node = 0; node < 50; ++node) {
    const bool hyperbolic = node % 2 == 0;
    MongeJet f;
    double rho0;
    int index0;
    if (hyperbolic) {
      const PrenormalForm h = random_prenormal(rng);
      f = disguised(rng, h);
      rho0 = closed_rho(h);
      index0 = sign_of(h.I * h.J - h.a * h.b);
    } else {
      do {
        f = random_normalized_elliptic(rng);
        rho0 = oracle_elliptic_rho(f);
      } while (std::abs(rho0) < 0.01 || std::abs(rho0) > 50);
      index0 = sign_of(rho0);
    }
    for (int k = 0; k < 20; ++k) {
      const MongeJet g = project_regraph(f, random_projective(rng));
      double rho;
      int index;
      if (hyperbolic) {
        rho = rho_hyperbonode(g, {0, 0}).value;
        index = index_hyperbonode(g, {0, 0});
      } else {
        rho = rho_ellipnode(g, {0, 0});
        index = sign_of(rho);
      }
      worst = std::max(worst, rel(rho, rho0));
      index_bad += index != index0;
    }
  }
  return {worst <= 1e-6 && index_bad == 0,
          fmt("50 nodes x 20 maps vs reference values: max relative gap %.3g, %.0f index changes", worst, index_bad)};
}

Outcome c11_labels() {
  Rng rng(11);
  int points = 0, bad = 0, leaves = 0, leaf_bad = 0;
  while (points < 100) {
    Poly2 p(5);
    for (int d = 2; d <= 5; ++d)
      for (int j = 0; j <= d; ++j) p.set(d - j, j, U(rng, -2, 2));
    const MongeJet f(p, 5);
    const Point2 at{U(rng, -0.5, 0.5), U(rng, -0.5, 0.5)};
    if (oracle::discriminant(f, at.x, at.y) < 0.05) continue;
    const JetSample s = f.sample(at.x, at.y);
    const AsymptoticFrame fr = asymptotic_directions(s, at);
    if (std::abs(frame_determinant(s, at, fr.directions[0])) < 1e-3 ||
        std::abs(frame_determinant(s, at, fr.directions[1])) < 1e-3)
      continue;
    const AsymptoticFrame lab = left_right_label(f, fr);
    ++points;
    for (int k = 0; k < 2; ++k) {
      const Vec2 d = fr.directions[k].unit();
      const double angle = std::atan2(d.y, d.x);
      std::optional<double> det;
      for (double h : {2e-3, 5e-4, 1e-4})
        if (!det) det = oracle::frame_det(f, at, angle, h);
      if (!det || (*det > 0 ? Label::right : Label::left) != lab.labels[k]) ++bad;
    }
    if (leaves < 10) {
      ++leaves;
      const Vec2 d0 = fr.directions[0].unit();
      const oracle::CurveWalk w = oracle::walk(f, at, std::atan2(d0.y, d0.x), 2e-3, 50);
      double angle = std::atan2(d0.y, d0.x);
      for (const Point2& q : w.pts) {
        if (oracle::discriminant(f, q.x, q.y) < 0.01) break;
        const auto a = oracle::asymptotic_angle(f, q.x, q.y, angle);
        if (!a) break;
        angle = *a;
        if (label_direction(f, q, Direction::from_vector({std::cos(angle), std::sin(angle)})) != lab.labels[0]) {
          ++leaf_bad;
          break;
        }
      }
    }
  }
  return {bad == 0 && leaf_bad == 0,
          fmt("100 points: %.0f disagreements with the angle-walk frame; %.0f of 10 leaves change label", bad,
              leaf_bad)};
}

}  // namespace

int main() {
  struct Item {
    const char* name;
    std::function<Outcome()> run;
    double budget;
  };
  const Item items[] = {
      {"prenormal relation", c1_prenormal_relation, 5},
      {"formula vs tangent-line cross-ratio", c2_formula_vs_lines, 5},
      {"diagonal formula", c3_diagonal_formula, 30},
      {"index formulas", c4_index, 30},
      {"ellipnode formula", c5_ellipnode, 30},
      {"disc surface index sum", c6_disc, 10},
      {"double hyperbonode sweep", c7_double_hyperbonode, 60},
      {"flec-hyperbonode sweep", c8_flec, 60},
      {"ellipnode sweeps", c9_ellipnodes, 60},
      {"projective invariance", c10_projective, 60},
      {"left/right labeling", c11_labels, 30},
  };
  int failed = 0, id = 0;
  for (const Item& item : items) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = item.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > item.budget) {
      o.passed = false;
      o.detail += fmt(" (over the %.0f s budget)", item.budget);
    }
    failed += !o.passed;
    std::printf("[%s] %2d %s: %s (%.2f s)\n", o.passed ? "PASS" : "FAIL", ++id, item.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", id - failed, id);
  return failed == 0 ? 0 : 1;
}
