#include "projumb/verify.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>

#include "projumb/curve_tracing.hpp"
#include "projumb/error.hpp"
#include "projumb/family_sweep.hpp"
#include "projumb/invariants.hpp"
#include "projumb/local_geometry.hpp"
#include "projumb/nodes.hpp"

namespace projumb {

namespace {

using Terms = std::map<std::pair<int, int>, std::vector<double>>;
using Rng = std::mt19937_64;

struct Outcome {
  bool passed = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double U(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

PrenormalForm random_prenormal(Rng& rng) {
  for (;;) {
    const PrenormalForm h{U(rng, -2, 2), U(rng, -2, 2), U(rng, -2, 2), U(rng, -2, 2)};
    if (std::abs(h.I * h.J) > 0.05) return h;
  }
}

// Prenormal form plus quintic terms moved by a linear change, a z scaling
// and a cubic shift. The origin stays a hyperbonode with the same rho.
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

// Projective map fixing the origin with a non-vertical image tangent plane.
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

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

Outcome prenormal_relation() {
  Rng rng(101);
  double worst = 0;
  for (int k = 0; k < 500; ++k) {
    const PrenormalForm h = random_prenormal(rng);
    const ExtendedReal r = rho_hyperbonode(h.jet(), {0, 0});
    if (r.infinite) return {false, "infinite rho at a generic instance"};
    worst = std::max(worst, std::abs(r.value - (1 - h.a * h.b / (h.I * h.J))));
  }
  return {worst <= 1e-9, fmt("500 instances, max |rho - (1 - ab/IJ)| = %.3g", worst)};
}

Outcome formula_vs_lines() {
  Rng rng(102);
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
    ++n;
    const ExtendedReal a = rho_formula_axes(s), b = cross_ratio(flecnodal_tangent_lines(f));
    if (a.infinite != b.infinite) return {false, "formula and cross-ratio disagree on infinity"};
    if (!a.infinite) worst = std::max(worst, rel(b.value, a.value));
  }
  return {worst <= 1e-9, fmt("200 adapted jets, max relative gap %.3g", worst)};
}

Outcome diagonal_formula() {
  Rng rng(103);
  double worst = 0;
  int n = 0;
  while (n < 200) {
    const PrenormalForm h = random_prenormal(rng);
    const double rho = 1 - h.a * h.b / (h.I * h.J);
    if (std::abs(rho) > 50) continue;
    const MongeJet g = disguised(rng, h);
    ++n;
    const ExtendedReal a = rho_hyperbonode(g, {0, 0}), d = rho_hyperbonode_diagonal(g, {0, 0});
    if (a.infinite || d.infinite) return {false, "infinite rho at a generic instance"};
    worst = std::max({worst, rel(d.value, a.value), rel(a.value, rho)});
  }
  return {worst <= 1e-7, fmt("200 disguised hyperbonodes, max relative gap %.3g", worst)};
}

Outcome index_formulas() {
  Rng rng(104);
  int n = 0, bad = 0;
  while (n < 500) {
    const PrenormalForm h{U(rng, -2, 2), U(rng, -2, 2), U(rng, -2, 2), U(rng, -2, 2)};
    if (std::abs(h.I * h.J - h.a * h.b) <= 1e-6) continue;
    ++n;
    const int want = sign_of(h.I * h.J - h.a * h.b);
    const MongeJet f = h.jet();
    const AdaptedChart dg = adapted_chart(f, 0, 0, ChartMode::diagonals);
    const JetSample ds = kill_cubic(dg.jet, QuadraticKind::hyperbolic, 1e-6).jet.sample(0, 0);
    int axes = 0;
    try {
      axes = index_hyperbonode(f, {0, 0});
    } catch (const Error&) {
    }
    if (axes != want || index_expression_diagonal(ds) != want) ++bad;
  }
  return {bad == 0, fmt("500 prenormal forms, %.0f sign disagreements", bad)};
}

Outcome ellipnode_formula() {
  Rng rng(105);
  double worst = 0;
  int n = 0;
  while (n < 200) {
    const MongeJet f = random_normalized_elliptic(rng);
    double formula;
    try {
      formula = rho_formula_elliptic(f.sample(0, 0));
    } catch (const Error&) {
      continue;
    }
    ++n;
    const std::complex<double> cr = ellipnode_cross_ratio(f);
    worst = std::max({worst, rel(cr.real(), formula), std::abs(cr.imag()) / std::max(1.0, std::abs(formula))});
  }
  const JetTerm t1[] = {{2, 0, 0.5}, {0, 2, 0.5}, {4, 0, 1.0 / 24}, {0, 4, 1.0 / 24}};
  const JetTerm t2[] = {{2, 0, 0.5}, {0, 2, 0.5}, {4, 0, 1.0 / 24}, {0, 4, 1.0 / 24}, {3, 1, 1.0 / 6}};
  const double w1 = std::abs(rho_ellipnode(MongeJet::from_terms(t1), {0, 0}) - 1.0);
  const double w2 = std::abs(rho_ellipnode(MongeJet::from_terms(t2), {0, 0}) - 0.8);
  return {worst <= 1e-9 && w1 <= 1e-12 && w2 <= 1e-12,
          fmt("200 elliptic jets, max gap %.3g; worked values off by %.3g, %.3g", worst, w1, w2)};
}

bool segments_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

bool simple_closed(const Polyline& pl) {
  if (!pl.closed || pl.vertices.size() < 4) return false;
  const std::size_t n = pl.vertices.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(pl.vertices[i].pos, pl.vertices[(i + 1) % n].pos, pl.vertices[j].pos,
                         pl.vertices[(j + 1) % n].pos))
        return false;
    }
  return true;
}

Outcome disc_index_sum() {
  const JetTerm terms[] = {{1, 1, 1.0}, {4, 0, 1.0}, {2, 2, 2.0}, {0, 4, 1.0}};
  const MongeJet f = MongeJet::from_terms(terms);
  const Window w{-2, 2, -2, 2};
  const TracedCurve par = trace_parabolic(f, w, 512);
  if (par.segments.size() != 1 || !simple_closed(par.segments[0]))
    return {false, fmt("parabolic curve has %.0f polylines, not one Jordan curve", par.segments.size())};
  const ComponentMap cm = components(f, w, par);
  const int id = cm.component_at({0, 0});
  if (id < 0) return {false, "origin outside every component"};
  const DomainComponent& c = cm.components[id];
  if (c.kind != PointKind::hyperbolic || c.touches_boundary || c.euler_characteristic != 1)
    return {false, "enclosed component is not a hyperbolic disc"};
  int sum = 0, count = 0;
  for (const NodeRecord& n : find_hyperbonodes(f, w, 512))
    if (cm.component_at(n.position) == id) {
      sum += n.index;
      ++count;
    }
  return {sum == 1, fmt("Jordan parabolic curve, disc component chi = 1, %.0f hyperbonodes, index sum %.0f",
                        count, sum)};
}

FamilyJet double_hyperbonode_family() {
  return FamilyJet(Terms{{{1, 1}, {1}}, {{3, 1}, {0, 1.0 / 6}}, {{1, 3}, {1.0 / 6}}, {{4, 0}, {1.0 / 24}},
                         {{0, 4}, {1.0 / 24}}},
                   5);
}

FamilyJet flec_family() {
  return FamilyJet(Terms{{{1, 1}, {1}}, {{3, 1}, {1.0 / 6}}, {{1, 3}, {1.0 / 6}}, {{4, 0}, {0, 1.0 / 24}},
                         {{0, 4}, {1.0 / 24}}},
                   5);
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

const Transition* first_of(const SweepReport& r, TransitionKind k) {
  for (const Transition& t : r.transitions)
    if (t.kind == k) return &t;
  return nullptr;
}

int hyperbolic_id(const SweepSample& s) {
  for (const ComponentSummary& c : s.components)
    if (c.kind == PointKind::hyperbolic) return c.id;
  return -1;
}

Outcome double_hyperbonode_sweep() {
  const SweepReport r = sweep(double_hyperbonode_family(), options({-1, 1, -1, 1}, 128, 0.5, 1.5, 200));
  const Transition* tr = first_of(r, TransitionKind::creation_annihilation);
  if (!tr) return {false, "no creation-annihilation event"};
  if (tr->sample_hi - tr->sample_lo > 2 || std::abs(tr->t_lo - 1) > 1e-3 || std::abs(tr->t_hi - 1) > 1e-3)
    return {false, fmt("event bracket t in [%.6g, %.6g] over %.0f steps", tr->t_lo, tr->t_hi,
                       tr->sample_hi - tr->sample_lo)};
  if (!tr->contract_ok || !*tr->contract_ok) return {false, "colliding pair: " + tr->note};
  const int id = hyperbolic_id(r.samples.front());
  const IndexSumSeries s = index_sum(r, id);
  for (int k = 0; k < static_cast<int>(s.sums.size()); ++k)
    if ((k <= tr->sample_lo || k >= tr->sample_hi) && s.sums[k] != s.sums.front())
      return {false, fmt("index sum changes at t = %.6g", r.samples[k].t)};
  return {true, fmt("event at t in [%.9g, %.9g], index sum %.0f outside the bracket; ", tr->t_lo, tr->t_hi,
                    s.sums.front()) +
                    tr->note};
}

Outcome flec_sweep() {
  const SweepReport r = sweep(flec_family(), options({-0.5, 0.5, -0.5, 0.5}, 64, -0.5, 0.5, 101));
  const Transition* tr = first_of(r, TransitionKind::flec_hyperbonode);
  if (!tr) return {false, "no flec-hyperbonode event"};
  if (std::abs(tr->t_lo) > 1e-3 || std::abs(tr->t_hi) > 1e-3)
    return {false, fmt("flec event at t in [%.6g, %.6g]", tr->t_lo, tr->t_hi)};
  if (first_of(r, TransitionKind::creation_annihilation)) return {false, "spurious creation event"};
  int index = 0;
  bool infinite_at_zero = false;
  for (const SweepSample& s : r.samples) {
    if (s.hyperbonodes.size() != 1 || norm(s.hyperbonodes[0].position) > 1e-8)
      return {false, fmt("origin node missing at t = %.6g", s.t)};
    const NodeRecord& n = s.hyperbonodes[0];
    if (index == 0) index = n.index;
    if (n.index != index) return {false, fmt("index changes at t = %.6g", s.t)};
    if (std::abs(s.t) < 1e-12) infinite_at_zero = n.rho.infinite;
  }
  return {infinite_at_zero && index != 0,
          fmt("origin node persists with index %.0f; rho infinite at t = 0: ", index) +
              (infinite_at_zero ? "yes" : "no")};
}

Outcome ellipnode_sweeps() {
  const FamilyJet persistent(Terms{{{2, 0}, {0.5}}, {{0, 2}, {0.5}}, {{4, 0}, {1.0 / 24}}, {{0, 4}, {1.0 / 24}},
                                   {{3, 1}, {0, 1.0 / 6}}},
                             5);
  SweepOptions o = options({-0.5, 0.5, -0.5, 0.5}, 48, 0.0, 1.0, 100);
  o.hyperbonodes = false;
  const SweepReport a = sweep(persistent, o);
  const IndexSumSeries sa = index_sum(a, 0);
  for (int v : sa.sums)
    if (v != sa.sums.front()) return {false, "sign sum changes along the persistent family"};
  if (!a.transitions.empty()) return {false, "spurious transition in the persistent family"};

  const FamilyJet dbl(Terms{{{2, 0}, {0.5}}, {{0, 2}, {0.5}}, {{4, 0}, {1.0 / 24}}, {{0, 5}, {1.0 / 120}},
                            {{0, 3}, {0, 1.0 / 6}}},
                      5);
  SweepOptions od = options({-0.5, 0.5, -0.5, 0.5}, 48, -0.05, 0.05, 20);
  od.hyperbonodes = false;
  const SweepReport b = sweep(dbl, od);
  int neg = 0, pos = 0;
  for (const SweepSample& s : b.samples) {
    const auto& e = s.ellipnodes;
    if (e.size() == 2 && e[0].index == -e[1].index && e[0].index != 0)
      (s.t < 0 ? neg : pos) += 1;
    else if (!e.empty())
      return {false, fmt("unexpected ellipnode set at t = %.6g", s.t)};
  }
  const bool one_side = (neg > 0) != (pos > 0);
  const Transition* tr = first_of(b, TransitionKind::double_ellipnode);
  return {one_side && tr && tr->contract_ok && *tr->contract_ok,
          fmt("sign sum %.0f over 100 steps; opposite pair on %.0f samples before and %.0f after the event",
              sa.sums.front(), neg, pos)};
}

Outcome projective_invariance() {
  Rng rng(110);
  double worst = 0;
  int index_bad = 0;
  for (int node = 0; node < 50; ++node) {
    const bool hyperbolic = node % 2 == 0;
    MongeJet f;
    double rho0;
    int index0;
    if (hyperbolic) {
      PrenormalForm h;
      do h = random_prenormal(rng);
      while (std::abs(1 - h.a * h.b / (h.I * h.J)) > 50 || std::abs(1 - h.a * h.b / (h.I * h.J)) < 0.01);
      f = disguised(rng, h);
      rho0 = rho_hyperbonode(f, {0, 0}).value;
      index0 = index_hyperbonode(f, {0, 0});
    } else {
      do {
        f = random_normalized_elliptic(rng);
        try {
          rho0 = rho_formula_elliptic(f.sample(0, 0));
        } catch (const Error&) {
          rho0 = 0;
        }
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
          fmt("50 nodes x 20 maps: max relative rho change %.3g, %.0f index changes", worst, index_bad)};
}

// Central-difference frame of the space curve along the asymptotic
// foliation through p, from an RK4 walk of the unit direction field.
std::optional<double> walked_frame(const MongeJet& f, Point2 p, Vec2 dir, double h) {
  auto step = [&](Point2 q, Vec2 ref, double ds) -> std::optional<std::pair<Point2, Vec2>> {
    try {
      const Vec2 k1 = follow_direction(f.sample(q.x, q.y), ref);
      const Point2 q2 = q + (ds / 2) * k1;
      const Vec2 k2 = follow_direction(f.sample(q2.x, q2.y), k1);
      const Point2 q3 = q + (ds / 2) * k2;
      const Vec2 k3 = follow_direction(f.sample(q3.x, q3.y), k2);
      const Point2 q4 = q + ds * k3;
      const Vec2 k4 = follow_direction(f.sample(q4.x, q4.y), k3);
      return std::make_pair(q + (ds / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), k4);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  const int sub = 8;
  std::array<Point2, 5> pts;
  pts[2] = p;
  for (int side = 0; side < 2; ++side) {
    Point2 q = p;
    Vec2 ref = side == 0 ? dir : -1.0 * dir;
    for (int k = 1; k <= 2 * sub; ++k) {
      const auto next = step(q, ref, h / sub);
      if (!next) return std::nullopt;
      q = next->first;
      ref = next->second;
      if (k == sub) pts[side == 0 ? 3 : 1] = q;
    }
    pts[side == 0 ? 4 : 0] = q;
  }
  std::array<std::array<double, 3>, 5> g;
  for (int k = 0; k < 5; ++k) g[k] = {pts[k].x, pts[k].y, f.value(pts[k].x, pts[k].y)};
  std::array<double, 3> d1, d2, d3;
  for (int c = 0; c < 3; ++c) {
    d1[c] = (g[3][c] - g[1][c]) / (2 * h);
    d2[c] = (g[3][c] - 2 * g[2][c] + g[1][c]) / (h * h);
    d3[c] = (g[4][c] - 2 * g[3][c] + 2 * g[1][c] - g[0][c]) / (2 * h * h * h);
  }
  return d1[0] * (d2[1] * d3[2] - d2[2] * d3[1]) - d1[1] * (d2[0] * d3[2] - d2[2] * d3[0]) +
         d1[2] * (d2[0] * d3[1] - d2[1] * d3[0]);
}

Outcome labeling() {
  Rng rng(111);
  int points = 0, bad = 0, walks = 0, walk_bad = 0;
  while (points < 100) {
    Poly2 p(5);
    for (int d = 2; d <= 5; ++d)
      for (int j = 0; j <= d; ++j) p.set(d - j, j, U(rng, -2, 2));
    const MongeJet f(p, 5);
    const Point2 at{U(rng, -0.5, 0.5), U(rng, -0.5, 0.5)};
    const JetSample s = f.sample(at.x, at.y);
    const PointClass pc = classify_sample(s);
    if (pc.kind != PointKind::hyperbolic || pc.discriminant < 0.05) continue;
    const AsymptoticFrame fr = asymptotic_directions(s, at);
    std::array<double, 2> det{};
    bool usable = true;
    for (int k = 0; k < 2; ++k) {
      det[k] = frame_determinant(s, at, fr.directions[k]);
      usable = usable && std::abs(det[k]) > 1e-3;
    }
    if (!usable) continue;
    const AsymptoticFrame lab = left_right_label(f, fr);
    ++points;
    for (int k = 0; k < 2; ++k) {
      const Vec2 d = fr.directions[k].unit();
      std::optional<double> ref;
      for (double h : {2e-3, 5e-4, 1e-4})
        if (!ref) ref = walked_frame(f, at, d, h);
      if (!ref || (*ref > 0 ? Label::right : Label::left) != lab.labels[k]) ++bad;
    }
    if (walks < 10) {
      // Labels along 50 points of the foliation leaf of direction 0.
      ++walks;
      Point2 q = at;
      Vec2 ref = fr.directions[0].unit();
      for (int k = 0; k < 50; ++k) {
        try {
          const JetSample sq = f.sample(q.x, q.y);
          if (classify_sample(sq).discriminant < 0.01) break;
          const Vec2 v = follow_direction(sq, ref);
          if (label_direction(f, q, Direction::from_vector(v)) != lab.labels[0]) {
            ++walk_bad;
            break;
          }
          ref = v;
          q = q + 2e-3 * v;
        } catch (const Error&) {
          break;
        }
      }
    }
  }
  return {bad == 0 && walk_bad == 0,
          fmt("100 points: %.0f label disagreements with the walked frame; %.0f of 10 leaves change label",
              bad, walk_bad)};
}

}  // namespace

std::vector<CriterionResult> verify_builtin(const std::function<void(const CriterionResult&)>& on_result) {
  struct Item {
    const char* name;
    Outcome (*run)();
    double budget;  // seconds
  };
  const Item items[] = {
      {"prenormal relation", prenormal_relation, 5},
      {"formula vs tangent-line cross-ratio", formula_vs_lines, 5},
      {"diagonal formula", diagonal_formula, 30},
      {"index formulas", index_formulas, 30},
      {"ellipnode formula", ellipnode_formula, 30},
      {"disc surface index sum", disc_index_sum, 10},
      {"double hyperbonode sweep", double_hyperbonode_sweep, 60},
      {"flec-hyperbonode sweep", flec_sweep, 60},
      {"ellipnode sweeps", ellipnode_sweeps, 60},
      {"projective invariance", projective_invariance, 60},
      {"left/right labeling", labeling, 30},
  };
  std::vector<CriterionResult> out;
  int id = 0;
  for (const Item& item : items) {
    CriterionResult r;
    r.id = ++id;
    r.name = item.name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Outcome o = item.run();
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > item.budget) {
      r.passed = false;
      r.detail += fmt(" (over the %.0f s budget)", item.budget);
    }
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace projumb
