#include "projumb/nodes.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <set>

#include "projumb/error.hpp"
#include "projumb/invariants.hpp"
#include "projumb/parallel.hpp"

namespace projumb {

const char* to_string(NodeKind kind) noexcept {
  return kind == NodeKind::hyperbonode ? "hyperbonode" : "ellipnode";
}

namespace {

constexpr int kMaxIterations = 50;
constexpr double kMaxCondition = 1e12;

JetSample transposed(const JetSample& s) {
  JetSample t;
  for (int d = 0; d <= kSampleOrder; ++d)
    for (int j = 0; j <= d; ++j) t.f[JetSample::index(d - j, j)] = s(j, d - j);
  return t;
}

// Flecnodal function along one asymptotic sheet and its gradient in (x, y),
// in the slope chart where |slope| <= 1.
struct SheetValue {
  double g;
  Vec2 grad;
};

SheetValue sheet_value(const JetSample& s0, Vec2 d) {
  const bool dual = std::abs(d.y) > std::abs(d.x);
  const JetSample s = dual ? transposed(s0) : s0;
  const double p = dual ? d.x / d.y : d.y / d.x, p2 = p * p, p3 = p2 * p;
  const double au = s(3, 0) + 2 * s(2, 1) * p + s(1, 2) * p2;
  const double av = s(2, 1) + 2 * s(1, 2) * p + s(0, 3) * p2;
  const double ap = 2 * s(1, 1) + 2 * s(0, 2) * p;
  const double i = s(3, 0) + 3 * s(2, 1) * p + 3 * s(1, 2) * p2 + s(0, 3) * p3;
  const double iu = s(4, 0) + 3 * s(3, 1) * p + 3 * s(2, 2) * p2 + s(1, 3) * p3;
  const double iv = s(3, 1) + 3 * s(2, 2) * p + 3 * s(1, 3) * p2 + s(0, 4) * p3;
  const double ip = 3 * s(2, 1) + 6 * s(1, 2) * p + 3 * s(0, 3) * p2;
  const double du = iu - ip * au / ap, dv = iv - ip * av / ap;
  return {i, dual ? Vec2{dv, du} : Vec2{du, dv}};
}

// Complex flecnodal function at the slope root with positive imaginary part.
struct ComplexValue {
  std::complex<double> j, jx, jy;
};

std::optional<ComplexValue> complex_value(const JetSample& s, const Tolerances& tol) {
  const PointClass pc = classify_sample(s, tol);
  if (pc.kind != PointKind::elliptic) return std::nullopt;
  using C = std::complex<double>;
  const C p(-s(1, 1) / s(0, 2), std::sqrt(-pc.discriminant) / std::abs(s(0, 2)));
  const C p2 = p * p, p3 = p2 * p;
  const C ax = s(3, 0) + 2 * s(2, 1) * p + s(1, 2) * p2;
  const C ay = s(2, 1) + 2 * s(1, 2) * p + s(0, 3) * p2;
  const C ap = 2 * s(1, 1) + 2 * s(0, 2) * p;
  const C i = s(3, 0) + 3 * s(2, 1) * p + 3 * s(1, 2) * p2 + s(0, 3) * p3;
  const C ix = s(4, 0) + 3 * s(3, 1) * p + 3 * s(2, 2) * p2 + s(1, 3) * p3;
  const C iy = s(3, 1) + 3 * s(2, 2) * p + 3 * s(1, 3) * p2 + s(0, 4) * p3;
  const C ip = 3 * s(2, 1) + 6 * s(1, 2) * p + 3 * s(0, 3) * p2;
  return ComplexValue{i, ix - ip * ax / ap, iy - ip * ay / ap};
}

struct System {
  double r0, r1;
  Mat2 jac;  // rows: gradients of r0, r1
};

// Evaluates the defining system at q; `dirs` tracks the two sheets.
std::optional<System> evaluate(const MongeJet& jet, Point2 q, NodeKind kind,
                               std::array<Vec2, 2>& dirs, const Tolerances& tol) {
  const JetSample s = jet.sample(q.x, q.y);
  if (kind == NodeKind::hyperbonode) {
    if (classify_sample(s, tol).kind != PointKind::hyperbolic) return std::nullopt;
    dirs[0] = follow_direction(s, dirs[0], tol);
    dirs[1] = follow_direction(s, dirs[1], tol);
    if (std::abs(cross(dirs[0], dirs[1])) < 1e-12) return std::nullopt;
    const SheetValue a = sheet_value(s, dirs[0]), b = sheet_value(s, dirs[1]);
    return System{a.g, b.g, Mat2{a.grad.x, a.grad.y, b.grad.x, b.grad.y}};
  }
  const auto c = complex_value(s, tol);
  if (!c) return std::nullopt;
  return System{c->j.real(), c->j.imag(),
                Mat2{c->jx.real(), c->jy.real(), c->jx.imag(), c->jy.imag()}};
}

double frob(const Mat2& m) { return std::sqrt(m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d); }

}  // namespace

double dedup_radius(const Window& window, const Tolerances& tol) {
  return 10.0 * tol.node * std::max(1.0, window.diameter());
}

NodeRecord refine_node(const MongeJet& jet, Point2 seed, NodeKind kind, const Tolerances& tol) {
  std::array<Vec2, 2> dirs{};
  if (kind == NodeKind::hyperbonode) {
    const JetSample s = jet.sample(seed.x, seed.y);
    if (classify_sample(s, tol).kind != PointKind::hyperbolic)
      throw Error(ErrorCode::refinement, "hyperbonode seed outside the hyperbolic domain");
    const auto vs = asymptotic_vectors(s);
    dirs = {(1.0 / norm(vs[0])) * vs[0], (1.0 / norm(vs[1])) * vs[1]};
  } else if (classify_point(jet, seed.x, seed.y, tol).kind != PointKind::elliptic) {
    throw Error(ErrorCode::refinement, "ellipnode seed outside the elliptic domain");
  }

  Point2 q = seed;
  auto sys = evaluate(jet, q, kind, dirs, tol);
  if (!sys) throw Error(ErrorCode::refinement, "seed is degenerate");
  auto residual = [](const System& s) { return std::max(std::abs(s.r0), std::abs(s.r1)); };
  double res = residual(*sys);
  for (int it = 0; it <= kMaxIterations; ++it) {
    const double accept = tol.node * std::max(1.0, frob(sys->jac));
    const double det = sys->jac.det();
    const double cond = det == 0.0 ? INFINITY : frob(sys->jac) * frob(sys->jac) / std::abs(det);
    // Near a degenerate root a small residual does not pin the position, so
    // the Newton error estimate must be small too.
    const double err = det == 0.0 ? INFINITY : res * frob(sys->jac) / std::abs(det);
    if (res == 0.0 || (res <= accept && err <= tol.node * std::max(1.0, std::hypot(q.x, q.y)))) {
      // One more step if it still improves the root, without counting it.
      if (res > 0.0 && std::isfinite(cond) && cond <= kMaxCondition) {
        const Vec2 step{(sys->jac.d * sys->r0 - sys->jac.b * sys->r1) / det,
                        (sys->jac.a * sys->r1 - sys->jac.c * sys->r0) / det};
        std::array<Vec2, 2> d2 = dirs;
        const Point2 q2 = q - step;
        const auto s2 = evaluate(jet, q2, kind, d2, tol);
        if (s2 && residual(*s2) < res) {
          q = q2;
          res = residual(*s2);
        }
      }
      NodeRecord out;
      out.kind = kind;
      out.position = q;
      out.residual = res;
      out.iterations = it;
      return out;
    }
    if (it == kMaxIterations) break;
    if (!(cond <= kMaxCondition))
      throw Error(ErrorCode::refinement, "Jacobian conditioning above 1e12");
    const Vec2 step{(sys->jac.d * sys->r0 - sys->jac.b * sys->r1) / det,
                    (sys->jac.a * sys->r1 - sys->jac.c * sys->r0) / det};
    // Damped step: halve until the residual drops.
    double lambda = 1.0;
    bool moved = false;
    for (int h = 0; h < 12; ++h, lambda *= 0.5) {
      std::array<Vec2, 2> d2 = dirs;
      const Point2 q2 = q - lambda * step;
      const auto s2 = evaluate(jet, q2, kind, d2, tol);
      if (s2 && residual(*s2) < res) {
        q = q2;
        dirs = d2;
        sys = s2;
        res = residual(*s2);
        moved = true;
        break;
      }
    }
    if (!moved) throw Error(ErrorCode::refinement, "Newton stalled");
  }
  throw Error(ErrorCode::refinement, "no convergence in 50 iterations");
}

void populate_invariants(const MongeJet& jet, NodeRecord& node, const Tolerances& tol) {
  const Point2 p = node.position;
  if (node.kind == NodeKind::ellipnode) {
    try {
      const double r = rho_ellipnode(jet, p, tol);
      node.rho = ExtendedReal::finite(r);
      node.index = sign_of(r);
      node.flags.double_node = std::abs(r) <= kRhoDoubleEllipnode;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::non_generic && e.code() != ErrorCode::not_a_node &&
          e.code() != ErrorCode::normalization && e.code() != ErrorCode::precondition)
        throw;
      node.rho = ExtendedReal::infinity();
      node.flags.non_generic = true;
    }
    return;
  }
  try {
    node.rho = rho_hyperbonode(jet, p, tol);
    const AdaptedChart c = adapted_chart(jet, p.x, p.y, ChartMode::axes, tol);
    const JetSample s = c.jet.sample(0.0, 0.0);
    node.index = index_expression_axes(s);
    try {
      node.parity = parity(jet, p, tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::biflecnode_degenerate) throw;
      node.parity = 0;
    }
    if (node.rho.infinite || std::abs(node.rho.value) >= kRhoFlecNode) node.flags.flec_hyperbonode = true;
    if (!node.rho.infinite && std::abs(node.rho.value) <= kRhoDoubleNode) node.flags.double_node = true;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::degree_overflow || e.code() == ErrorCode::invalid_argument) throw;
    node.flags.non_generic = true;
  }
}

namespace {

std::vector<NodeRecord> refine_all(const MongeJet& jet, const Window& window, std::vector<Point2> seeds,
                                   NodeKind kind, const Tolerances& tol, NodeReport* report) {
  std::sort(seeds.begin(), seeds.end(),
            [](Point2 a, Point2 b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  seeds.erase(std::unique(seeds.begin(), seeds.end(),
                          [](Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }),
              seeds.end());
  std::vector<std::optional<NodeRecord>> out(seeds.size());
  std::vector<std::string> why(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t k) {
    try {
      out[k] = refine_node(jet, seeds[k], kind, tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::refinement && e.code() != ErrorCode::degenerate_point) throw;
      why[k] = e.what();
    }
  });
  const double slack = 1e-9 * window.diameter();
  const double r = dedup_radius(window, tol);
  std::vector<NodeRecord> nodes;
  if (report) report->seeds += static_cast<int>(seeds.size());
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    if (!out[k]) {
      if (report) {
        ++report->discarded;
        report->notes.push_back("seed (" + std::to_string(seeds[k].x) + ", " +
                                std::to_string(seeds[k].y) + "): " + why[k]);
      }
      continue;
    }
    if (!window.contains(out[k]->position, slack)) continue;
    bool dup = false;
    for (const NodeRecord& n : nodes)
      if (distance(n.position, out[k]->position) <= r) {
        dup = true;
        break;
      }
    if (!dup) nodes.push_back(*out[k]);
  }
  parallel_for(nodes.size(), [&](std::size_t k) { populate_invariants(jet, nodes[k], tol); });
  std::sort(nodes.begin(), nodes.end(), [](const NodeRecord& a, const NodeRecord& b) {
    return a.position.x != b.position.x ? a.position.x < b.position.x : a.position.y < b.position.y;
  });
  return nodes;
}

Point2 cell_center(const Window& w, int grid, std::int64_t cell) {
  const int i = static_cast<int>(cell % grid), j = static_cast<int>(cell / grid);
  return {w.xmin + (i + 0.5) * w.width() / grid, w.ymin + (j + 0.5) * w.height() / grid};
}

Point2 grid_vertex(const Window& w, int grid, int i, int j) {
  return {w.xmin + i * w.width() / grid, w.ymin + j * w.height() / grid};
}

}  // namespace

std::vector<NodeRecord> find_hyperbonodes(const MongeJet& jet, const Window& window, int grid,
                                          const Tolerances& tol_in, NodeReport* report) {
  const Tolerances tol = tol_in.with_diameter(window.diameter());
  const auto [left, right] = trace_flecnodal(jet, window, grid, tol);
  if (left.degenerate || right.degenerate) return {};
  std::set<std::int64_t> near_left;
  for (std::int64_t c : left.cells()) {
    const int i = static_cast<int>(c % grid), j = static_cast<int>(c / grid);
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di)
        if (i + di >= 0 && j + dj >= 0 && i + di < grid && j + dj < grid)
          near_left.insert(static_cast<std::int64_t>(j + dj) * grid + i + di);
  }
  std::vector<Point2> seeds;
  for (std::int64_t c : right.cells())
    if (near_left.count(c)) seeds.push_back(cell_center(window, grid, c));

  // Grid vertices where both sheets are already flecnodal.
  const int nv = grid + 1;
  std::vector<char> hit(static_cast<std::size_t>(nv) * nv, 0);
  parallel_for(static_cast<std::size_t>(nv), [&](std::size_t jr) {
    const int j = static_cast<int>(jr);
    for (int i = 0; i < nv; ++i) {
      const Point2 p = grid_vertex(window, grid, i, j);
      const JetSample s = jet.sample(p.x, p.y);
      if (classify_sample(s, tol).kind != PointKind::hyperbolic) continue;
      const auto vs = asymptotic_vectors(s);
      const double scale = std::max({1.0, std::abs(s(3, 0)), std::abs(s(2, 1)), std::abs(s(1, 2)),
                                     std::abs(s(0, 3))});
      bool both = true;
      for (Vec2 v : vs) both = both && std::abs(sheet_value(s, (1.0 / norm(v)) * v).g) <= 1e-8 * scale;
      hit[j * nv + i] = both;
    }
  });
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nv; ++i)
      if (hit[j * nv + i]) seeds.push_back(grid_vertex(window, grid, i, j));
  return refine_all(jet, window, std::move(seeds), NodeKind::hyperbonode, tol, report);
}

std::vector<NodeRecord> find_ellipnodes(const MongeJet& jet, const Window& window, int grid,
                                        const Tolerances& tol_in, NodeReport* report) {
  if (!window.valid()) throw Error(ErrorCode::invalid_argument, "degenerate window");
  if (grid < kMinGrid || grid > kMaxGrid)
    throw Error(ErrorCode::invalid_argument, "grid must lie in [16, 4096]");
  const Tolerances tol = tol_in.with_diameter(window.diameter());
  const int nv = grid + 1;
  std::vector<std::optional<std::complex<double>>> val(static_cast<std::size_t>(nv) * nv);
  std::vector<double> scale(val.size(), 0.0);
  parallel_for(static_cast<std::size_t>(nv), [&](std::size_t jr) {
    const int j = static_cast<int>(jr);
    for (int i = 0; i < nv; ++i) {
      const Point2 p = grid_vertex(window, grid, i, j);
      const JetSample s = jet.sample(p.x, p.y);
      const auto c = complex_value(s, tol);
      if (c) val[j * nv + i] = c->j;
      scale[j * nv + i] = std::max({1.0, std::abs(s(3, 0)), std::abs(s(2, 1)), std::abs(s(1, 2)),
                                    std::abs(s(0, 3))});
    }
  });
  std::vector<Point2> seeds;
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nv; ++i) {
      const auto& v = val[j * nv + i];
      if (v && std::abs(*v) <= 1e-8 * scale[j * nv + i]) seeds.push_back(grid_vertex(window, grid, i, j));
    }
  // Cells around which the complex value winds.
  for (int j = 0; j < grid; ++j)
    for (int i = 0; i < grid; ++i) {
      const std::array<std::size_t, 4> c{static_cast<std::size_t>(j * nv + i),
                                         static_cast<std::size_t>(j * nv + i + 1),
                                         static_cast<std::size_t>((j + 1) * nv + i + 1),
                                         static_cast<std::size_t>((j + 1) * nv + i)};
      bool ok = true;
      for (std::size_t k : c) ok = ok && val[k] && std::abs(*val[k]) > 0.0;
      if (!ok) continue;
      double turn = 0.0;
      for (int k = 0; k < 4; ++k) turn += std::arg(*val[c[(k + 1) % 4]] / *val[c[k]]);
      if (std::abs(turn) > M_PI) seeds.push_back(cell_center(window, grid, static_cast<std::int64_t>(j) * grid + i));
    }
  return refine_all(jet, window, std::move(seeds), NodeKind::ellipnode, tol, report);
}

}  // namespace projumb
