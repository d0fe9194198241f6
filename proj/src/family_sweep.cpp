#include "projumb/family_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <tuple>

#include "projumb/error.hpp"
#include "projumb/invariants.hpp"
#include "projumb/parallel.hpp"

namespace projumb {

const char* to_string(TransitionKind kind) noexcept {
  switch (kind) {
    case TransitionKind::creation_annihilation: return "creation-annihilation";
    case TransitionKind::flec_hyperbonode: return "flec-hyperbonode";
    case TransitionKind::double_ellipnode: return "double-ellipnode";
    case TransitionKind::topology_change: return "topology-change";
  }
  return "unknown";
}

std::vector<double> sample_parameters(double t0, double t1, int steps) {
  std::vector<double> t(steps);
  for (int k = 0; k < steps; ++k) t[k] = k == steps - 1 ? t1 : t0 + (t1 - t0) * k / (steps - 1);
  return t;
}

namespace {

struct Topology {
  TopologySignature signature;
  ComponentMap map;
};

Topology topology_at(const MongeJet& jet, const SweepOptions& o) {
  const TracedCurve parabolic = trace_parabolic(jet, o.window, o.grid, o.tol);
  Topology out;
  out.map = components(jet, o.window, parabolic);
  for (const DomainComponent& c : out.map.components)
    out.signature.parts.push_back({c.kind, c.touches_boundary, c.pixel_euler, c.boundary_loops});
  std::sort(out.signature.parts.begin(), out.signature.parts.end());
  out.signature.parabolic_polylines = static_cast<int>(parabolic.segments.size());
  return out;
}

bool degenerate(const NodeRecord& n) { return n.flags.any(); }

SweepSample evaluate(const FamilyJet& family, double t, const SweepOptions& o) {
  const MongeJet jet = family.at(t);
  SweepSample s;
  s.t = t;
  const Topology topo = topology_at(jet, o);
  s.topology = topo.signature;
  NodeReport rep;
  if (o.hyperbonodes) s.hyperbonodes = find_hyperbonodes(jet, o.window, o.grid, o.tol, &rep);
  if (o.ellipnodes) s.ellipnodes = find_ellipnodes(jet, o.window, o.grid, o.tol, &rep);
  s.discarded_seeds = rep.discarded;
  for (const DomainComponent& c : topo.map.components) {
    ComponentSummary cs;
    cs.id = c.id;
    cs.kind = c.kind;
    cs.touches_boundary = c.touches_boundary;
    cs.euler_characteristic = c.euler_characteristic;
    cs.boundary_loops = c.boundary_loops;
    s.components.push_back(cs);
  }
  for (const NodeRecord& n : s.hyperbonodes) {
    const int id = topo.map.component_at(n.position);
    s.hyperbonode_component.push_back(id);
    if (id < 0) continue;
    ComponentSummary& cs = s.components[id];
    ++cs.n_hyperbonodes;
    cs.index_sum += n.index;
    cs.flagged = cs.flagged || degenerate(n);
  }
  for (const NodeRecord& n : s.ellipnodes) {
    const int id = topo.map.component_at(n.position);
    s.ellipnode_component.push_back(id);
    if (id < 0) continue;
    ComponentSummary& cs = s.components[id];
    ++cs.n_ellipnodes;
    cs.sign_sum += n.index;
    cs.flagged = cs.flagged || degenerate(n);
  }
  return s;
}

// Greedy nearest-neighbour matching within r; injective.
std::vector<int> match(const std::vector<NodeRecord>& a, const std::vector<NodeRecord>& b, double r) {
  std::vector<std::tuple<double, int, int>> pairs;
  for (int i = 0; i < static_cast<int>(a.size()); ++i)
    for (int j = 0; j < static_cast<int>(b.size()); ++j) {
      const double d = distance(a[i].position, b[j].position);
      if (d <= r) pairs.emplace_back(d, i, j);
    }
  std::sort(pairs.begin(), pairs.end());
  std::vector<int> out(a.size(), -1);
  std::vector<bool> used(b.size(), false);
  for (const auto& [d, i, j] : pairs)
    if (out[i] < 0 && !used[j]) {
      out[i] = j;
      used[j] = true;
    }
  return out;
}

int rho_sign(const NodeRecord& n) { return n.rho.infinite ? 0 : sign_of(n.rho.value); }

struct Event {
  TransitionKind kind;
  int k;
  Point2 location;
};

void pair_events(const std::vector<NodeRecord>& a, const std::vector<NodeRecord>& b,
                 const std::vector<int>& m, int k, bool hyper, std::vector<Event>& out) {
  std::vector<bool> hit(b.size(), false);
  std::vector<Point2> unmatched;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (m[i] < 0) {
      unmatched.push_back(a[i].position);
      continue;
    }
    hit[m[i]] = true;
    const NodeRecord& u = a[i];
    const NodeRecord& v = b[m[i]];
    if (hyper) {
      const bool flec = u.flags.flec_hyperbonode || v.flags.flec_hyperbonode;
      const int su = rho_sign(u), sv = rho_sign(v);
      if (flec || (su != 0 && sv != 0 && su != sv)) {
        const bool parity_flip = u.parity != 0 && v.parity != 0 && u.parity != v.parity;
        out.push_back({flec || parity_flip ? TransitionKind::flec_hyperbonode
                                           : TransitionKind::creation_annihilation,
                       k, u.position});
      }
    } else if (rho_sign(u) != rho_sign(v) || u.flags.double_node || v.flags.double_node) {
      out.push_back({TransitionKind::double_ellipnode, k, u.position});
    }
  }
  for (std::size_t j = 0; j < b.size(); ++j)
    if (!hit[j]) unmatched.push_back(b[j].position);
  if (!unmatched.empty()) {
    Point2 c{0, 0};
    for (Point2 p : unmatched) c = c + (1.0 / unmatched.size()) * Vec2{p.x, p.y};
    out.push_back({hyper ? TransitionKind::creation_annihilation : TransitionKind::double_ellipnode, k, c});
  }
}

// Answer of a bisection predicate: the probe behaves like the lower or the
// upper end, could not be evaluated (retried once off-centre), or ends the
// search.
enum class Probe { lower, upper, failed, stop };

// Bisection on a predicate; returns the final bracket. `complete` is false
// when the search ended early.
std::pair<double, double> bisect(double lo, double hi, const std::function<Probe(double)>& probe, bool& complete) {
  complete = true;
  for (int e = 0; e < kMaxLocalizeEvaluations; ++e) {
    double mid = 0.5 * (lo + hi);
    Probe p = probe(mid);
    if (p == Probe::failed && ++e < kMaxLocalizeEvaluations) {
      mid = lo + 0.382 * (hi - lo);
      p = probe(mid);
    }
    if (p == Probe::failed || p == Probe::stop) {
      complete = false;
      break;
    }
    (p == Probe::lower ? lo : hi) = mid;
  }
  return {lo, hi};
}

// Node of `nodes` nearest to p within r.
const NodeRecord* nearest(const std::vector<NodeRecord>& nodes, Point2 p, double r) {
  const NodeRecord* best = nullptr;
  double bd = r;
  for (const NodeRecord& n : nodes) {
    const double d = distance(n.position, p);
    if (d <= bd) {
      bd = d;
      best = &n;
    }
  }
  return best;
}

void localize(const FamilyJet& family, const SweepReport& rep, Transition& tr, double r_near) {
  const SweepOptions& o = rep.options;
  const SweepSample& a = rep.samples[tr.sample_lo];
  const SweepSample& b = rep.samples[tr.sample_hi];
  tr.t_lo = a.t;
  tr.t_hi = b.t;
  const bool hyper = tr.kind != TransitionKind::double_ellipnode;

  if (tr.kind == TransitionKind::topology_change) {
    const TopologySignature sig = a.topology;
    auto [lo, hi] = bisect(a.t, b.t, [&](double t) {
      try {
        return topology_at(family.at(t), o).signature == sig ? Probe::lower : Probe::upper;
      } catch (const Error&) {
        return Probe::failed;
      }
    }, tr.localized);
    tr.t_lo = lo;
    tr.t_hi = hi;
    return;
  }

  // A flagged node at a bracketing sample pins the event.
  for (int k = tr.sample_lo; k <= tr.sample_hi; ++k) {
    const auto& nodes = hyper ? rep.samples[k].hyperbonodes : rep.samples[k].ellipnodes;
    const NodeRecord* n = nearest(nodes, tr.location, r_near);
    if (!n) continue;
    const bool pinned = tr.kind == TransitionKind::flec_hyperbonode ? n->flags.flec_hyperbonode
                                                                     : n->flags.double_node;
    if (pinned) {
      tr.t_lo = tr.t_hi = rep.samples[k].t;
      tr.localized = true;
      tr.flagged = true;
      return;
    }
  }

  const NodeKind kind = hyper ? NodeKind::hyperbonode : NodeKind::ellipnode;
  const auto& na = hyper ? a.hyperbonodes : a.ellipnodes;
  const auto& nb = hyper ? b.hyperbonodes : b.ellipnodes;
  const NodeRecord* pa = nearest(na, tr.location, r_near);
  const NodeRecord* pb = nearest(nb, tr.location, r_near);

  auto flag_of = [&](const NodeRecord& n) {
    if (!hyper) return n.flags.double_node;
    return tr.kind == TransitionKind::flec_hyperbonode ? n.flags.flec_hyperbonode || n.rho.infinite
                                                       : n.flags.double_node;
  };

  // Persisting node whose rho changes sign: bisect on that sign.
  if (pa && pb && rho_sign(*pa) != 0 && rho_sign(*pb) != 0 && rho_sign(*pa) != rho_sign(*pb)) {
    const int s0 = rho_sign(*pa);
    Point2 track = pa->position;
    std::optional<NodeRecord> last_lo, last_hi;
    std::optional<double> pinned;
    auto [lo, hi] = bisect(a.t, b.t, [&](double t) {
      try {
        const MongeJet jet = family.at(t);
        NodeRecord n = refine_node(jet, track, kind, o.tol);
        populate_invariants(jet, n, o.tol);
        if (flag_of(n) || rho_sign(n) == 0) {
          last_hi = n;
          pinned = t;
          return Probe::stop;
        }
        const bool same = rho_sign(n) == s0;
        (same ? last_lo : last_hi) = n;
        track = n.position;
        return same ? Probe::lower : Probe::upper;
      } catch (const Error&) {
        return Probe::failed;
      }
    }, tr.localized);
    tr.t_lo = pinned ? *pinned : lo;
    tr.t_hi = pinned ? *pinned : hi;
    tr.flagged = (last_lo && flag_of(*last_lo)) || (last_hi && flag_of(*last_hi));
    if (pinned) tr.localized = true;
    return;
  }

  // Otherwise bisect on the node count in a small window around the event.
  const double cell = std::max(o.window.width(), o.window.height()) / o.grid;
  double half = 4 * cell;
  for (const auto* nodes : {&na, &nb})
    for (const NodeRecord& n : *nodes)
      if (distance(n.position, tr.location) <= r_near)
        half = std::max(half, 1.5 * std::max(std::abs(n.position.x - tr.location.x),
                                             std::abs(n.position.y - tr.location.y)));
  const Window local{std::max(o.window.xmin, tr.location.x - half), std::min(o.window.xmax, tr.location.x + half),
                     std::max(o.window.ymin, tr.location.y - half), std::min(o.window.ymax, tr.location.y + half)};
  auto count = [&](double t) -> std::optional<int> {
    try {
      const MongeJet jet = family.at(t);
      return static_cast<int>(hyper ? find_hyperbonodes(jet, local, 32, o.tol).size()
                                    : find_ellipnodes(jet, local, 32, o.tol).size());
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  const auto c0 = count(a.t), c1 = count(b.t);
  if (!c0 || !c1 || *c0 == *c1) return;
  auto [lo, hi] = bisect(a.t, b.t, [&](double t) {
    const auto c = count(t);
    if (!c) return Probe::failed;
    return *c == *c0 ? Probe::lower : Probe::upper;
  }, tr.localized);
  tr.t_lo = lo;
  tr.t_hi = hi;
  // Flag check on the richer end.
  const double t_rich = *c0 > *c1 ? lo : hi;
  try {
    const MongeJet jet = family.at(t_rich);
    const auto nodes = hyper ? find_hyperbonodes(jet, local, 32, o.tol) : find_ellipnodes(jet, local, 32, o.tol);
    for (const NodeRecord& n : nodes) tr.flagged = tr.flagged || flag_of(n);
  } catch (const Error&) {
  }
}

}  // namespace

SweepReport sweep(const FamilyJet& family, const SweepOptions& o) {
  if (o.steps < 2 || o.steps > kMaxSteps)
    throw Error(ErrorCode::invalid_argument, "steps must lie in [2, 100000]");
  if (!o.window.valid()) throw Error(ErrorCode::invalid_argument, "degenerate window");
  if (o.grid < kMinGrid || o.grid > kMaxGrid)
    throw Error(ErrorCode::invalid_argument, "grid must lie in [16, 4096]");
  if (!std::isfinite(o.t0) || !std::isfinite(o.t1) || !(o.t1 > o.t0))
    throw Error(ErrorCode::invalid_argument, "t range must be increasing");
  SweepReport rep;
  rep.options = o;
  const std::vector<double> ts = sample_parameters(o.t0, o.t1, o.steps);
  rep.samples.resize(ts.size());
  parallel_for(ts.size(), [&](std::size_t k) { rep.samples[k] = evaluate(family, ts[k], o); });

  // Matching.
  const double boot = o.window.diameter() / o.steps;
  const double cap = 0.1 * o.window.diameter() / 5.0;
  double disp = 0.0;
  bool have_disp = false;
  std::vector<Event> events;
  std::vector<double> radii;
  for (std::size_t k = 0; k + 1 < rep.samples.size(); ++k) {
    const double r = have_disp ? std::max(5.0 * disp, boot) : boot;
    radii.push_back(r);
    const SweepSample& a = rep.samples[k];
    const SweepSample& b = rep.samples[k + 1];
    const auto mh = match(a.hyperbonodes, b.hyperbonodes, r);
    const auto me = match(a.ellipnodes, b.ellipnodes, r);
    double step_disp = 0.0;
    for (std::size_t i = 0; i < mh.size(); ++i)
      if (mh[i] >= 0) step_disp = std::max(step_disp, distance(a.hyperbonodes[i].position, b.hyperbonodes[mh[i]].position));
    for (std::size_t i = 0; i < me.size(); ++i)
      if (me[i] >= 0) step_disp = std::max(step_disp, distance(a.ellipnodes[i].position, b.ellipnodes[me[i]].position));
    // A node created in this step moved at least as far as its distance from
    // the nearest node it could have split from.
    auto creation = [&](const std::vector<NodeRecord>& from, const std::vector<NodeRecord>& to,
                        const std::vector<int>& m) {
      std::vector<bool> hit(to.size(), false);
      for (int j : m)
        if (j >= 0) hit[j] = true;
      for (std::size_t j = 0; j < to.size(); ++j) {
        if (hit[j]) continue;
        double d = INFINITY;
        for (const NodeRecord& n : from) d = std::min(d, distance(n.position, to[j].position));
        if (std::isfinite(d)) step_disp = std::max(step_disp, std::min(d, cap));
      }
    };
    creation(a.hyperbonodes, b.hyperbonodes, mh);
    creation(a.ellipnodes, b.ellipnodes, me);
    if (!mh.empty() || !me.empty()) {
      disp = step_disp;
      have_disp = true;
    }
    rep.matching.hyperbonodes.push_back(mh);
    rep.matching.ellipnodes.push_back(me);
    pair_events(a.hyperbonodes, b.hyperbonodes, mh, static_cast<int>(k), true, events);
    pair_events(a.ellipnodes, b.ellipnodes, me, static_cast<int>(k), false, events);
    if (!(a.topology == b.topology))
      events.push_back({TransitionKind::topology_change, static_cast<int>(k),
                        {o.window.xmin + 0.5 * o.window.width(), o.window.ymin + 0.5 * o.window.height()}});
  }

  // Merge events of one kind in the same or adjacent intervals near each other.
  std::stable_sort(events.begin(), events.end(), [](const Event& x, const Event& y) {
    return std::tie(x.kind, x.k) < std::tie(y.kind, y.k);
  });
  const double near = 0.1 * o.window.diameter();
  for (const Event& e : events) {
    Transition* into = nullptr;
    for (Transition& tr : rep.transitions)
      if (tr.kind == e.kind && e.k <= tr.sample_hi && distance(tr.location, e.location) <= near) into = &tr;
    if (into) {
      into->sample_hi = std::max(into->sample_hi, e.k + 1);
      continue;
    }
    Transition tr;
    tr.kind = e.kind;
    tr.sample_lo = e.k;
    tr.sample_hi = e.k + 1;
    tr.location = e.location;
    rep.transitions.push_back(tr);
  }
  std::vector<double> r_near(rep.transitions.size());
  for (std::size_t i = 0; i < rep.transitions.size(); ++i)
    r_near[i] = std::max(radii[rep.transitions[i].sample_lo], near);
  parallel_for(rep.transitions.size(), [&](std::size_t i) { localize(family, rep, rep.transitions[i], r_near[i]); });
  std::stable_sort(rep.transitions.begin(), rep.transitions.end(),
                   [](const Transition& x, const Transition& y) { return x.t_lo < y.t_lo; });
  detect_transitions(rep);
  return rep;
}

std::vector<Transition> detect_transitions(SweepReport& rep) {
  if (rep.samples.size() < 2) throw Error(ErrorCode::invalid_argument, "need at least two samples");
  rep.contract_failures.clear();
  for (Transition& tr : rep.transitions) {
    const SweepSample& a = rep.samples[tr.sample_lo];
    const SweepSample& b = rep.samples[tr.sample_hi];
    switch (tr.kind) {
      case TransitionKind::creation_annihilation:
      case TransitionKind::double_ellipnode: {
        const bool hyper = tr.kind == TransitionKind::creation_annihilation;
        const auto& na = hyper ? a.hyperbonodes : a.ellipnodes;
        const auto& nb = hyper ? b.hyperbonodes : b.ellipnodes;
        if (na.size() == nb.size()) {
          tr.contract_ok = std::nullopt;
          tr.note = "node count unchanged across the bracket";
          break;
        }
        std::vector<NodeRecord> rich = na.size() > nb.size() ? na : nb;
        std::sort(rich.begin(), rich.end(), [&](const NodeRecord& x, const NodeRecord& y) {
          return distance(x.position, tr.location) < distance(y.position, tr.location);
        });
        if (rich.size() < 2) {
          tr.contract_ok = false;
          tr.note = "fewer than two nodes on the richer side";
        } else {
          tr.contract_ok = rich[0].index * rich[1].index == -1;
          tr.note = "nearest pair indices " + std::to_string(rich[0].index) + ", " + std::to_string(rich[1].index);
        }
        break;
      }
      case TransitionKind::flec_hyperbonode: {
        // Follow the node nearest to the event through the matching.
        int cur = -1;
        double best = INFINITY;
        for (std::size_t i = 0; i < a.hyperbonodes.size(); ++i) {
          const double d = distance(a.hyperbonodes[i].position, tr.location);
          if (d < best) {
            best = d;
            cur = static_cast<int>(i);
          }
        }
        bool ok = cur >= 0;
        const int index0 = ok ? a.hyperbonodes[cur].index : 0;
        for (int k = tr.sample_lo; ok && k < tr.sample_hi; ++k) {
          cur = rep.matching.hyperbonodes[k][cur];
          ok = cur >= 0 && rep.samples[k + 1].hyperbonodes[cur].index == index0;
        }
        tr.contract_ok = ok;
        tr.note = ok ? "index " + std::to_string(index0) + " preserved" : "index not preserved along the node";
        break;
      }
      case TransitionKind::topology_change:
        tr.contract_ok = std::nullopt;
        break;
    }
    if (tr.contract_ok && !*tr.contract_ok)
      rep.contract_failures.push_back(std::string(to_string(tr.kind)) + " at t in [" + std::to_string(tr.t_lo) +
                                      ", " + std::to_string(tr.t_hi) + "]: " + tr.note);
  }
  return rep.transitions;
}

IndexSumSeries index_sum(const SweepReport& rep, int component_id) {
  IndexSumSeries out;
  for (const SweepSample& s : rep.samples) {
    if (component_id < 0 || component_id >= static_cast<int>(s.components.size()))
      throw Error(ErrorCode::coverage, "component " + std::to_string(component_id) + " missing at t = " +
                                           std::to_string(s.t));
    const ComponentSummary& c = s.components[component_id];
    out.sums.push_back(c.kind == PointKind::hyperbolic ? c.index_sum : c.sign_sum);
    out.touches_boundary.push_back(c.touches_boundary);
  }
  for (std::size_t k = 0; k + 1 < out.sums.size(); ++k) {
    if (out.sums[k] == out.sums[k + 1]) continue;
    bool covered = false;
    for (const Transition& tr : rep.transitions)
      if (tr.kind == TransitionKind::topology_change && tr.sample_lo <= static_cast<int>(k) &&
          static_cast<int>(k) < tr.sample_hi)
        covered = true;
    if (!covered) out.uncovered_changes.push_back(static_cast<int>(k));
  }
  return out;
}

}  // namespace projumb
