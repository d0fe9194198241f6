#include "projumb/curve_tracing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

#include "projumb/error.hpp"
#include "projumb/parallel.hpp"

namespace projumb {

const char* to_string(CurveKind kind) noexcept {
  switch (kind) {
    case CurveKind::parabolic: return "parabolic";
    case CurveKind::flecnodal_left: return "flecnodal-left";
    case CurveKind::flecnodal_right: return "flecnodal-right";
  }
  return "unknown";
}

std::size_t TracedCurve::vertex_count() const {
  std::size_t n = 0;
  for (const Polyline& p : segments) n += p.vertices.size();
  return n;
}

namespace {

struct Grid {
  Window w;
  int n;

  double hx() const { return w.width() / n; }
  double hy() const { return w.height() / n; }
  Point2 vertex(int i, int j) const {
    return {i == n ? w.xmax : w.xmin + i * hx(), j == n ? w.ymax : w.ymin + j * hy()};
  }
  std::int64_t vid(int i, int j) const { return static_cast<std::int64_t>(j) * (n + 1) + i; }
  std::int64_t hedge(int i, int j) const { return 2 * vid(i, j); }
  std::int64_t vedge(int i, int j) const { return 2 * vid(i, j) + 1; }
  // Endpoints of an edge as vertex coordinates.
  std::array<std::array<int, 2>, 2> ends(std::int64_t e) const {
    const std::int64_t v = e / 2;
    const int i = static_cast<int>(v % (n + 1)), j = static_cast<int>(v / (n + 1));
    if (e % 2 == 0) return {{{i, j}, {i + 1, j}}};
    return {{{i, j}, {i, j + 1}}};
  }
};

void check_args(const Window& w, int grid) {
  if (!w.valid()) throw Error(ErrorCode::invalid_argument, "degenerate window");
  if (grid < kMinGrid || grid > kMaxGrid)
    throw Error(ErrorCode::invalid_argument, "grid must lie in [16, 4096]");
}

struct Segment {
  std::int64_t a, b;
};

// Marching squares. signs(i, j, s) fills corner signs (+1/-1) of cell (i, j)
// in the order (i,j), (i+1,j), (i+1,j+1), (i,j+1) and returns false for a
// skipped cell; center(i, j) is the sign at the cell center (saddles only).
template <class Signs, class Center>
std::vector<Segment> march(const Grid& g, Signs&& signs, Center&& center) {
  std::vector<std::vector<Segment>> rows(g.n);
  parallel_for(static_cast<std::size_t>(g.n), [&](std::size_t jr) {
    const int j = static_cast<int>(jr);
    for (int i = 0; i < g.n; ++i) {
      std::array<int, 4> s;
      if (!signs(i, j, s)) continue;
      const std::array<std::int64_t, 4> edge{g.hedge(i, j), g.vedge(i + 1, j), g.hedge(i, j + 1),
                                             g.vedge(i, j)};
      // Edge k joins corners k and k+1 (mod 4), except edge 2 = corners 3,2.
      std::array<bool, 4> cut{s[0] != s[1], s[1] != s[2], s[3] != s[2], s[0] != s[3]};
      const int ncut = cut[0] + cut[1] + cut[2] + cut[3];
      if (ncut == 2) {
        std::array<std::int64_t, 2> e{};
        int m = 0;
        for (int k = 0; k < 4; ++k)
          if (cut[k]) e[m++] = edge[k];
        rows[j].push_back({e[0], e[1]});
      } else if (ncut == 4) {
        if (center(i, j) == s[0]) {
          // Corners 0 and 2 joined through the center: cut off corners 1 and 3.
          rows[j].push_back({edge[0], edge[1]});
          rows[j].push_back({edge[2], edge[3]});
        } else {
          rows[j].push_back({edge[3], edge[0]});
          rows[j].push_back({edge[1], edge[2]});
        }
      }
    }
  });
  std::vector<Segment> out;
  for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

// Chains segments through shared edges. Vertices whose refinement failed
// (absent from `verts`) split the chain.
std::vector<Polyline> link(const std::vector<Segment>& segs,
                           const std::map<std::int64_t, CurveVertex>& verts) {
  std::map<std::int64_t, std::vector<int>> at;
  for (int k = 0; k < static_cast<int>(segs.size()); ++k) {
    at[segs[k].a].push_back(k);
    at[segs[k].b].push_back(k);
  }
  std::vector<bool> used(segs.size(), false);
  std::vector<Polyline> out;
  auto walk = [&](std::int64_t start, bool closed_ok) {
    std::vector<std::int64_t> chain{start};
    std::int64_t cur = start;
    bool closed = false;
    for (;;) {
      int next = -1;
      for (int k : at[cur])
        if (!used[k]) {
          next = k;
          break;
        }
      if (next < 0) break;
      used[next] = true;
      cur = segs[next].a == cur ? segs[next].b : segs[next].a;
      if (cur == start && closed_ok) {
        closed = true;
        break;
      }
      chain.push_back(cur);
    }
    // Split at missing vertices.
    Polyline pl;
    bool broken = false;
    auto flush = [&] {
      if (pl.vertices.size() >= 2) out.push_back(pl);
      pl = Polyline{};
    };
    for (std::int64_t e : chain) {
      auto it = verts.find(e);
      if (it == verts.end()) {
        broken = true;
        flush();
        continue;
      }
      pl.vertices.push_back(it->second);
    }
    pl.closed = closed && !broken;
    flush();
  };
  for (const auto& [e, ks] : at)
    if (ks.size() == 1 && !used[ks[0]]) walk(e, false);
  for (const auto& [e, ks] : at)
    for (int k : ks)
      if (!used[k]) walk(e, true);
  return out;
}

// ---------------------------------------------------------------------------
// Parabolic curve
// ---------------------------------------------------------------------------

double disc(const JetSample& s) { return s(1, 1) * s(1, 1) - s(2, 0) * s(0, 2); }

Vec2 disc_gradient(const JetSample& s) {
  return {2 * s(1, 1) * s(2, 1) - s(3, 0) * s(0, 2) - s(2, 0) * s(1, 2),
          2 * s(1, 1) * s(1, 2) - s(2, 1) * s(0, 2) - s(2, 0) * s(0, 3)};
}

std::optional<CurveVertex> refine_parabolic(const MongeJet& jet, Point2 a, Point2 b, double va,
                                            std::int64_t edge, double& residual) {
  double lo = 0.0, hi = 1.0;
  const bool pos_lo = va > 0.0;
  const Vec2 e = b - a;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Point2 p = a + mid * e;
    if ((disc(jet.sample(p.x, p.y)) > 0.0) == pos_lo)
      lo = mid;
    else
      hi = mid;
  }
  double t = 0.5 * (lo + hi);
  // Newton polish along the edge.
  for (int it = 0; it < 4; ++it) {
    const Point2 p = a + t * e;
    const JetSample s = jet.sample(p.x, p.y);
    const double d = dot(disc_gradient(s), e);
    if (d == 0.0) break;
    const double nt = t - disc(s) / d;
    if (!(nt >= lo - 1e-12 && nt <= hi + 1e-12)) break;
    const Point2 q = a + nt * e;
    if (std::abs(disc(jet.sample(q.x, q.y))) > std::abs(disc(s))) break;
    t = nt;
  }
  const Point2 p = a + t * e;
  const JetSample s = jet.sample(p.x, p.y);
  residual = std::abs(disc(s));
  CurveVertex v;
  v.pos = p;
  v.edge = edge;
  // Double asymptotic direction: kernel of the (degenerate) quadratic form.
  const Vec2 k = std::abs(s(2, 0)) >= std::abs(s(0, 2)) ? Vec2{-s(1, 1), s(2, 0)}
                                                         : Vec2{s(0, 2), -s(1, 1)};
  if (norm(k) > 0.0) v.slope = Direction::from_vector(k);
  return v;
}

// ---------------------------------------------------------------------------
// Flecnodal curves
// ---------------------------------------------------------------------------

// Cubic form at a unit direction.
double cubic_at(const JetSample& s, Vec2 d) {
  const double u = d.x, v = d.y;
  return s(3, 0) * u * u * u + 3 * s(2, 1) * u * u * v + 3 * s(1, 2) * u * v * v +
         s(0, 3) * v * v * v;
}

Vec2 canonical(Vec2 d) {
  if (d.x < 0.0 || (d.x == 0.0 && d.y < 0.0)) return -1.0 * d;
  return d;
}

struct SheetVertex {
  bool valid = false;
  std::array<Vec2, 2> dir{};    // 0 = right, 1 = left; canonical orientation
  std::array<double, 2> g{};    // cubic form at dir
  std::array<int, 2> sign{};    // sign of g, zero counted positive
  bool hyperbolic = false;
  double gabs = 0.0;            // max |g| over both directions, labeled or not
};

// (|a|, |I|) and their derivatives along edge vector e and in the slope.
struct FlecSystem {
  double a, ia, ap, i, ii, ip;
};

FlecSystem flec_system(const JetSample& s, double p, Vec2 e) {
  const double p2 = p * p, p3 = p2 * p;
  FlecSystem r;
  r.a = s(2, 0) + 2 * s(1, 1) * p + s(0, 2) * p2;
  const double ax = s(3, 0) + 2 * s(2, 1) * p + s(1, 2) * p2;
  const double ay = s(2, 1) + 2 * s(1, 2) * p + s(0, 3) * p2;
  r.ia = ax * e.x + ay * e.y;
  r.ap = 2 * s(1, 1) + 2 * s(0, 2) * p;
  r.i = s(3, 0) + 3 * s(2, 1) * p + 3 * s(1, 2) * p2 + s(0, 3) * p3;
  const double ix = s(4, 0) + 3 * s(3, 1) * p + 3 * s(2, 2) * p2 + s(1, 3) * p3;
  const double iy = s(3, 1) + 3 * s(2, 2) * p + 3 * s(1, 3) * p2 + s(0, 4) * p3;
  r.ii = ix * e.x + iy * e.y;
  r.ip = 3 * s(2, 1) + 6 * s(1, 2) * p + 3 * s(0, 3) * p2;
  return r;
}

JetSample transposed(const JetSample& s) {
  JetSample t;
  for (int d = 0; d <= kSampleOrder; ++d)
    for (int j = 0; j <= d; ++j) t.f[JetSample::index(d - j, j)] = s(j, d - j);
  return t;
}

}  // namespace

std::pair<double, double> flecnodal_residual(const JetSample& s, Direction d) {
  const FlecSystem r = d.dual ? flec_system(transposed(s), d.slope, {0, 0})
                              : flec_system(s, d.slope, {0, 0});
  return {std::abs(r.a), std::abs(r.i)};
}

namespace {

std::optional<CurveVertex> refine_flecnodal(const MongeJet& jet, Point2 a, Point2 b, Vec2 da,
                                            int sign_a, std::int64_t edge, const Tolerances& tol,
                                            double& residual) {
  const Vec2 e = b - a;
  auto value = [&](double t, Vec2& d) {
    const Point2 p = a + t * e;
    const JetSample s = jet.sample(p.x, p.y);
    d = follow_direction(s, da, tol);
    return cubic_at(s, d);
  };
  double lo = 0.0, hi = 1.0;
  Vec2 dlo = da;
  try {
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      Vec2 d;
      const double g = value(mid, d);
      const int sg = g >= 0.0 ? 1 : -1;
      if (sg == sign_a) {
        lo = mid;
        dlo = d;
      } else {
        hi = mid;
      }
    }
  } catch (const Error& err) {
    if (err.code() == ErrorCode::degenerate_point) return std::nullopt;
    throw;
  }
  double t = 0.5 * (lo + hi);
  Vec2 d;
  try {
    value(t, d);
  } catch (const Error&) {
    d = dlo;
  }
  Direction dir = Direction::from_vector(d);

  // 2D Newton on (t, slope) for {a = 0, I = 0} in the chart of the slope.
  auto eval = [&](double tt, double slope) {
    const Point2 p = a + tt * e;
    const JetSample s = jet.sample(p.x, p.y);
    return dir.dual ? flec_system(transposed(s), slope, {e.y, e.x}) : flec_system(s, slope, e);
  };
  double slope = dir.slope;
  FlecSystem cur = eval(t, slope);
  double best = std::max(std::abs(cur.a), std::abs(cur.i));
  for (int it = 0; it < 6 && best > 0.0; ++it) {
    const double det = cur.ia * cur.ip - cur.ap * cur.ii;
    if (det == 0.0) break;
    const double dt = (cur.a * cur.ip - cur.ap * cur.i) / det;
    const double dp = (cur.ia * cur.i - cur.ii * cur.a) / det;
    const double nt = t - dt, np = slope - dp;
    if (!(nt >= -1e-9 && nt <= 1 + 1e-9) || std::abs(np) > 1.5) break;
    const FlecSystem nxt = eval(nt, np);
    const double r = std::max(std::abs(nxt.a), std::abs(nxt.i));
    if (!(r < best)) break;
    t = nt;
    slope = np;
    cur = nxt;
    best = r;
  }
  residual = best;
  CurveVertex v;
  v.pos = a + t * e;
  v.slope = {slope, dir.dual};
  v.edge = edge;
  return v;
}

SheetVertex sheet_vertex(const MongeJet& jet, Point2 p, const Tolerances& tol) {
  SheetVertex sv;
  const JetSample s = jet.sample(p.x, p.y);
  const PointClass pc = classify_sample(s, tol);
  if (pc.kind != PointKind::hyperbolic) return sv;
  sv.hyperbolic = true;
  for (Vec2 v : asymptotic_vectors(s)) sv.gabs = std::max(sv.gabs, std::abs(cubic_at(s, (1.0 / norm(v)) * v)));
  if (pc.discriminant < 10.0 * tol.parabolic(s)) return sv;
  AsymptoticFrame fr;
  try {
    fr = left_right_label(jet, asymptotic_directions(s, p, tol), tol);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::label_failure || e.code() == ErrorCode::degenerate_point) return sv;
    throw;
  }
  const int r = fr.find(Label::right), l = fr.find(Label::left);
  sv.dir = {canonical(fr.directions[r].unit()), canonical(fr.directions[l].unit())};
  for (int k = 0; k < 2; ++k) {
    sv.g[k] = cubic_at(s, sv.dir[k]);
    sv.sign[k] = sv.g[k] >= 0.0 ? 1 : -1;
  }
  sv.valid = true;
  return sv;
}

}  // namespace

TracedCurve trace_parabolic(const MongeJet& jet, const Window& window, int grid,
                            const Tolerances& tol) {
  check_args(window, grid);
  (void)tol;
  const Grid g{window, grid};
  const int nv = grid + 1;
  std::vector<double> val(static_cast<std::size_t>(nv) * nv);
  parallel_for(static_cast<std::size_t>(nv), [&](std::size_t jr) {
    const int j = static_cast<int>(jr);
    for (int i = 0; i < nv; ++i) {
      const Point2 p = g.vertex(i, j);
      val[g.vid(i, j)] = disc(jet.sample(p.x, p.y));
    }
  });
  auto sgn = [&](int i, int j) { return val[g.vid(i, j)] > 0.0 ? 1 : -1; };
  const auto segs = march(
      g,
      [&](int i, int j, std::array<int, 4>& s) {
        s = {sgn(i, j), sgn(i + 1, j), sgn(i + 1, j + 1), sgn(i, j + 1)};
        return true;
      },
      [&](int i, int j) {
        const Point2 c = g.vertex(i, j) + 0.5 * (g.vertex(i + 1, j + 1) - g.vertex(i, j));
        return disc(jet.sample(c.x, c.y)) > 0.0 ? 1 : -1;
      });

  std::set<std::int64_t> edge_set;
  for (const Segment& s : segs) {
    edge_set.insert(s.a);
    edge_set.insert(s.b);
  }
  const std::vector<std::int64_t> edges(edge_set.begin(), edge_set.end());
  std::vector<std::optional<CurveVertex>> found(edges.size());
  std::vector<double> res(edges.size(), 0.0);
  parallel_for(edges.size(), [&](std::size_t k) {
    const auto ends = g.ends(edges[k]);
    const Point2 a = g.vertex(ends[0][0], ends[0][1]), b = g.vertex(ends[1][0], ends[1][1]);
    found[k] = refine_parabolic(jet, a, b, val[g.vid(ends[0][0], ends[0][1])], edges[k], res[k]);
  });
  TracedCurve out;
  out.kind = CurveKind::parabolic;
  out.window = window;
  out.grid = grid;
  std::map<std::int64_t, CurveVertex> verts;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (!found[k]) {
      ++out.dropped;
      continue;
    }
    verts.emplace(edges[k], *found[k]);
    out.refinement_residual = std::max(out.refinement_residual, res[k]);
  }
  out.segments = link(segs, verts);
  return out;
}

std::pair<TracedCurve, TracedCurve> trace_flecnodal(const MongeJet& jet, const Window& window,
                                                    int grid, const Tolerances& tol_in) {
  check_args(window, grid);
  const Tolerances tol = tol_in.with_diameter(window.diameter());
  const Grid g{window, grid};
  const int nv = grid + 1;
  std::vector<SheetVertex> sv(static_cast<std::size_t>(nv) * nv);
  parallel_for(static_cast<std::size_t>(nv), [&](std::size_t jr) {
    const int j = static_cast<int>(jr);
    for (int i = 0; i < nv; ++i) sv[g.vid(i, j)] = sheet_vertex(jet, g.vertex(i, j), tol);
  });

  std::array<TracedCurve, 2> curves;
  // Degenerate: the cubic form vanishes at every valid vertex on both sheets.
  double gmax = 0.0, gscale = 0.0;
  int nvalid = 0;
  for (const SheetVertex& v : sv)
    if (v.hyperbolic) {
      ++nvalid;
      gmax = std::max(gmax, v.gabs);
    }
  {
    const JetSample s0 = jet.sample(window.xmin + 0.5 * window.width(), window.ymin + 0.5 * window.height());
    gscale = std::max({std::abs(s0(2, 0)), std::abs(s0(1, 1)), std::abs(s0(0, 2)), 1e-300});
  }
  const bool degenerate = nvalid > 0 && gmax <= tol.curve * std::max(1.0, gscale);

  for (int sheet = 0; sheet < 2; ++sheet) {
    TracedCurve& out = curves[sheet];
    out.kind = sheet == 0 ? CurveKind::flecnodal_right : CurveKind::flecnodal_left;
    out.window = window;
    out.grid = grid;
    out.degenerate = degenerate;
    if (degenerate) continue;
    const int other = 1 - sheet;
    std::vector<int> gap_rows(grid, 0);
    auto cell_signs = [&](int i, int j, std::array<int, 4>& s) {
      const std::array<const SheetVertex*, 4> c{&sv[g.vid(i, j)], &sv[g.vid(i + 1, j)],
                                                &sv[g.vid(i + 1, j + 1)], &sv[g.vid(i, j + 1)]};
      int nvalid_c = 0;
      for (const auto* v : c) nvalid_c += v->valid;
      if (nvalid_c < 4) {
        if (nvalid_c > 0) ++gap_rows[j];
        return false;
      }
      const Vec2 d0 = c[0]->dir[sheet], o0 = c[0]->dir[other];
      for (int k = 0; k < 4; ++k) {
        const double same = dot(c[k]->dir[sheet], d0);
        if (std::abs(same) <= std::abs(dot(c[k]->dir[sheet], o0))) {
          ++gap_rows[j];
          return false;
        }
        s[k] = c[k]->sign[sheet] * (same >= 0.0 ? 1 : -1);
      }
      return true;
    };
    auto center_sign = [&](int i, int j) {
      const Point2 c = g.vertex(i, j) + 0.5 * (g.vertex(i + 1, j + 1) - g.vertex(i, j));
      const Vec2 d0 = sv[g.vid(i, j)].dir[sheet];
      try {
        const JetSample s = jet.sample(c.x, c.y);
        const Vec2 d = follow_direction(s, d0, tol);
        return cubic_at(s, d) * sv[g.vid(i, j)].sign[sheet] >= 0.0 ? 1 : -1;
      } catch (const Error&) {
        return sv[g.vid(i, j)].sign[sheet];
      }
    };
    const auto segs = march(g, cell_signs, center_sign);
    for (int n : gap_rows) out.gaps += n;

    std::set<std::int64_t> edge_set;
    for (const Segment& s : segs) {
      edge_set.insert(s.a);
      edge_set.insert(s.b);
    }
    const std::vector<std::int64_t> edges(edge_set.begin(), edge_set.end());
    std::vector<std::optional<CurveVertex>> found(edges.size());
    std::vector<double> res(edges.size(), 0.0);
    std::vector<char> bad_label(edges.size(), 0);
    const Label want = sheet == 0 ? Label::right : Label::left;
    parallel_for(edges.size(), [&](std::size_t k) {
      const auto ends = g.ends(edges[k]);
      const SheetVertex& va = sv[g.vid(ends[0][0], ends[0][1])];
      const Point2 a = g.vertex(ends[0][0], ends[0][1]), b = g.vertex(ends[1][0], ends[1][1]);
      found[k] = refine_flecnodal(jet, a, b, va.dir[sheet], va.sign[sheet], edges[k], tol, res[k]);
      if (found[k] && res[k] > tol.curve) found[k].reset();
      if (!found[k]) return;
      try {
        if (label_direction(jet, found[k]->pos, found[k]->slope, tol) != want) bad_label[k] = 1;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::label_failure && e.code() != ErrorCode::degenerate_point) throw;
        bad_label[k] = 1;
      }
    });
    std::map<std::int64_t, CurveVertex> verts;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (!found[k]) {
        ++out.dropped;
        continue;
      }
      out.label_failures += bad_label[k];
      verts.emplace(edges[k], *found[k]);
      out.refinement_residual = std::max(out.refinement_residual, res[k]);
    }
    out.segments = link(segs, verts);
  }
  return {std::move(curves[1]), std::move(curves[0])};
}

std::vector<std::int64_t> TracedCurve::cells() const {
  std::set<std::int64_t> out;
  const Grid g{window, grid};
  for (const Polyline& pl : segments)
    for (const CurveVertex& v : pl.vertices) {
      if (v.edge < 0) continue;
      const auto ends = g.ends(v.edge);
      const int i = ends[0][0], j = ends[0][1];
      const bool horizontal = v.edge % 2 == 0;
      // Cells on both sides of the edge.
      const std::array<std::array<int, 2>, 2> side =
          horizontal ? std::array<std::array<int, 2>, 2>{{{i, j - 1}, {i, j}}}
                     : std::array<std::array<int, 2>, 2>{{{i - 1, j}, {i, j}}};
      for (const auto& c : side)
        if (c[0] >= 0 && c[1] >= 0 && c[0] < grid && c[1] < grid)
          out.insert(static_cast<std::int64_t>(c[1]) * grid + c[0]);
    }
  return {out.begin(), out.end()};
}

int ComponentMap::component_at(Point2 p) const {
  if (!window.contains(p, 1e-12 * window.diameter())) return -1;
  const int i = std::clamp(static_cast<int>(std::lround((p.x - window.xmin) / window.width() * grid)), 0, grid);
  const int j = std::clamp(static_cast<int>(std::lround((p.y - window.ymin) / window.height() * grid)), 0, grid);
  return label[static_cast<std::size_t>(j) * (grid + 1) + i];
}

ComponentMap components(const MongeJet& jet, const Window& window, const TracedCurve& parabolic) {
  const int grid = parabolic.grid;
  check_args(window, grid);
  const Grid g{window, grid};
  const int nv = grid + 1;
  std::vector<char> hyp(static_cast<std::size_t>(nv) * nv);
  parallel_for(static_cast<std::size_t>(nv), [&](std::size_t jr) {
    const int j = static_cast<int>(jr);
    for (int i = 0; i < nv; ++i) {
      const Point2 p = g.vertex(i, j);
      hyp[g.vid(i, j)] = disc(jet.sample(p.x, p.y)) > 0.0;
    }
  });
  ComponentMap cm;
  cm.window = window;
  cm.grid = grid;
  cm.label.assign(hyp.size(), -1);
  std::vector<std::int64_t> stack;
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nv; ++i) {
      if (cm.label[g.vid(i, j)] >= 0) continue;
      DomainComponent c;
      c.id = static_cast<int>(cm.components.size());
      c.kind = hyp[g.vid(i, j)] ? PointKind::hyperbolic : PointKind::elliptic;
      c.sample = g.vertex(i, j);
      const char want = hyp[g.vid(i, j)];
      stack.assign(1, g.vid(i, j));
      cm.label[g.vid(i, j)] = c.id;
      int edges = 0, faces = 0;
      while (!stack.empty()) {
        const std::int64_t v = stack.back();
        stack.pop_back();
        const int vi = static_cast<int>(v % nv), vj = static_cast<int>(v / nv);
        ++c.pixels;
        if (vi == 0 || vj == 0 || vi == grid || vj == grid) c.touches_boundary = true;
        const int nb[4][2] = {{vi + 1, vj}, {vi - 1, vj}, {vi, vj + 1}, {vi, vj - 1}};
        for (const auto& q : nb) {
          if (q[0] < 0 || q[1] < 0 || q[0] > grid || q[1] > grid) continue;
          const std::int64_t w = g.vid(q[0], q[1]);
          if (hyp[w] != want) continue;
          if (q[0] > vi || q[1] > vj) ++edges;
          if (cm.label[w] < 0) {
            cm.label[w] = c.id;
            stack.push_back(w);
          }
        }
        if (vi < grid && vj < grid && hyp[g.vid(vi + 1, vj)] == want &&
            hyp[g.vid(vi, vj + 1)] == want && hyp[g.vid(vi + 1, vj + 1)] == want)
          ++faces;
      }
      c.pixel_euler = c.pixels - edges + faces;
      if (!c.touches_boundary) c.euler_characteristic = c.pixel_euler;
      cm.components.push_back(c);
    }
  // Closed parabolic polylines bounding each component.
  for (const Polyline& pl : parabolic.segments) {
    if (!pl.closed || pl.vertices.empty() || pl.vertices.front().edge < 0) continue;
    const auto ends = g.ends(pl.vertices.front().edge);
    std::set<int> ids{cm.label[g.vid(ends[0][0], ends[0][1])], cm.label[g.vid(ends[1][0], ends[1][1])]};
    for (int id : ids)
      if (id >= 0) ++cm.components[id].boundary_loops;
  }
  return cm;
}

double hausdorff_distance(const TracedCurve& a, const TracedCurve& b) {
  std::vector<Point2> pa, pb;
  for (const Polyline& p : a.segments)
    for (const CurveVertex& v : p.vertices) pa.push_back(v.pos);
  for (const Polyline& p : b.segments)
    for (const CurveVertex& v : p.vertices) pb.push_back(v.pos);
  if (pa.empty() && pb.empty()) return 0.0;
  if (pa.empty() || pb.empty()) return INFINITY;
  // Bucket grid for nearest-point queries.
  auto one = [](const std::vector<Point2>& from, const std::vector<Point2>& to) {
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const Point2& p : to) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    const int nb = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(to.size()))));
    const double cw = std::max((xmax - xmin) / nb, 1e-300), ch = std::max((ymax - ymin) / nb, 1e-300);
    std::vector<std::vector<Point2>> buckets(static_cast<std::size_t>(nb) * nb);
    auto cell = [&](double v, double lo, double w) {
      return std::clamp(static_cast<int>((v - lo) / w), 0, nb - 1);
    };
    for (const Point2& p : to) buckets[cell(p.y, ymin, ch) * nb + cell(p.x, xmin, cw)].push_back(p);
    double worst = 0.0;
    for (const Point2& p : from) {
      const int ci = cell(p.x, xmin, cw), cj = cell(p.y, ymin, ch);
      double best = INFINITY;
      for (int r = 0; r <= nb; ++r) {
        for (int j = cj - r; j <= cj + r; ++j)
          for (int i = ci - r; i <= ci + r; ++i) {
            if (i < 0 || j < 0 || i >= nb || j >= nb) continue;
            if (std::max(std::abs(i - ci), std::abs(j - cj)) != r) continue;
            for (const Point2& q : buckets[j * nb + i]) best = std::min(best, distance(p, q));
          }
        // Every point outside ring r is at least r * min(cw, ch) away.
        if (best <= r * std::min(cw, ch)) break;
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one(pa, pb), one(pb, pa));
}

}  // namespace projumb
