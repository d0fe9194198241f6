#include "projumb.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "projumb/curve_tracing.hpp"
#include "projumb/error.hpp"
#include "projumb/family_sweep.hpp"
#include "projumb/invariants.hpp"
#include "projumb/io.hpp"
#include "projumb/nodes.hpp"
#include "projumb/verify.hpp"

struct pu_surface {
  projumb::MongeJet jet;
};

struct pu_family {
  projumb::FamilyJet family;
};

namespace {

using namespace projumb;

thread_local std::string last_error;

pu_status fail(pu_status s, const std::string& what) {
  last_error = what;
  return s;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size() + 1);
  return p;
}

// Runs body with exceptions mapped onto status codes.
template <class Body>
pu_status guarded(Body&& body) {
  last_error.clear();
  try {
    body();
    return PU_OK;
  } catch (const Error& e) {
    return fail(static_cast<pu_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PU_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PU_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::invalid_argument, what);
}

Tolerances tolerances(double scale, const Window& w) {
  require(std::isfinite(scale) && scale > 0, "tol_scale must be a positive number");
  return Tolerances{}.scaled(scale).with_diameter(w.diameter());
}

Window window_of(pu_window w) {
  const Window out{w.xmin, w.xmax, w.ymin, w.ymax};
  require(std::isfinite(w.xmin) && std::isfinite(w.xmax) && std::isfinite(w.ymin) && std::isfinite(w.ymax) &&
              out.valid(),
          "window must satisfy xmin < xmax and ymin < ymax");
  return out;
}

void check_grid(int grid) {
  require(grid >= kMinGrid && grid <= kMaxGrid, "grid must lie in [16, 4096]");
}

struct Traced {
  std::vector<TracedCurve> curves;
  ComponentMap map;
};

Traced trace_all(const MongeJet& jet, const Window& w, int grid, const Tolerances& tol) {
  Traced t;
  t.curves.push_back(trace_parabolic(jet, w, grid, tol));
  auto [left, right] = trace_flecnodal(jet, w, grid, tol);
  t.curves.push_back(std::move(left));
  t.curves.push_back(std::move(right));
  t.map = components(jet, w, t.curves[0]);
  return t;
}

}  // namespace

extern "C" {

const char* pu_version(void) { return "0.1.0"; }

const char* pu_status_name(pu_status status) {
  if (status == PU_OK) return "ok";
  if (status == PU_ERR_INTERNAL) return "internal";
  if (status >= PU_ERR_DEGREE_OVERFLOW && status <= PU_ERR_INVALID_ARGUMENT)
    return to_string(static_cast<ErrorCode>(static_cast<int>(status)));
  return "unknown";
}

const char* pu_last_error(void) { return last_error.c_str(); }

void pu_string_free(char* s) { std::free(s); }

pu_status pu_surface_from_json(const char* json, pu_surface** out) {
  if (!json || !out) return fail(PU_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new pu_surface{io::parse_surface(json)}; });
}

pu_status pu_surface_to_json(const pu_surface* surface, char** out_json) {
  if (!surface || !out_json) return fail(PU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out_json = dup(io::surface_json(surface->jet)); });
}

void pu_surface_free(pu_surface* surface) { delete surface; }

pu_status pu_family_from_json(const char* json, pu_family** out) {
  if (!json || !out) return fail(PU_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new pu_family{io::parse_family(json)}; });
}

pu_status pu_family_at(const pu_family* family, double t, pu_surface** out) {
  if (!family || !out) return fail(PU_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    require(std::isfinite(t), "t must be finite");
    *out = new pu_surface{family->family.at(t)};
  });
}

void pu_family_free(pu_family* family) { delete family; }

pu_status pu_classify(const pu_surface* surface, double x, double y, double tol_scale, char** out_json) {
  if (!surface || !out_json) return fail(PU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    require(std::isfinite(x) && std::isfinite(y), "point must be finite");
    require(std::isfinite(tol_scale) && tol_scale > 0, "tol_scale must be a positive number");
    const Tolerances tol = Tolerances{}.scaled(tol_scale);
    AsymptoticFrame frame;
    const PointClass pc = classify_point(surface->jet, x, y, tol);
    if (pc.kind == PointKind::borderline) {
      frame.point = {x, y};
      frame.discriminant = pc.discriminant;
    } else {
      frame = asymptotic_directions(surface->jet, x, y, tol);
      if (frame.kind == PointKind::hyperbolic) frame = left_right_label(surface->jet, frame, tol);
    }
    *out_json = dup(io::frame_json(frame) + "\n");
  });
}

pu_status pu_trace(const pu_surface* surface, pu_window window, int grid, double tol_scale, char** out_json,
                   char** out_svg) {
  if (!surface || !out_json) return fail(PU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const Window w = window_of(window);
    check_grid(grid);
    const Traced t = trace_all(surface->jet, w, grid, tolerances(tol_scale, w));
    std::string svg = out_svg ? io::render_svg(t.curves, {}, w, &t.map) : std::string();
    char* json = dup(io::trace_json(t.curves, &t.map));
    if (out_svg) {
      try {
        *out_svg = dup(svg);
      } catch (...) {
        std::free(json);
        throw;
      }
    }
    *out_json = json;
  });
}

pu_status pu_nodes(const pu_surface* surface, pu_window window, int grid, int kinds, double tol_scale,
                   char** out_json) {
  if (!surface || !out_json) return fail(PU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const Window w = window_of(window);
    check_grid(grid);
    require(kinds > 0 && (kinds & ~(PU_HYPERBONODES | PU_ELLIPNODES)) == 0, "kinds must be a nonempty node mask");
    const Tolerances tol = tolerances(tol_scale, w);
    std::vector<NodeRecord> nodes;
    if (kinds & PU_HYPERBONODES) nodes = find_hyperbonodes(surface->jet, w, grid, tol);
    if (kinds & PU_ELLIPNODES) {
      const auto e = find_ellipnodes(surface->jet, w, grid, tol);
      nodes.insert(nodes.end(), e.begin(), e.end());
    }
    *out_json = dup(io::nodes_json(nodes));
  });
}

pu_status pu_invariant(const pu_surface* surface, double x, double y, double tol_scale, char** out_json) {
  if (!surface || !out_json) return fail(PU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    require(std::isfinite(x) && std::isfinite(y), "point must be finite");
    require(std::isfinite(tol_scale) && tol_scale > 0, "tol_scale must be a positive number");
    const Tolerances tol = Tolerances{}.scaled(tol_scale);
    const PointClass pc = classify_point(surface->jet, x, y, tol);
    if (pc.kind == PointKind::borderline)
      throw Error(ErrorCode::degenerate_point, "parabolic point: no node kind");
    const NodeKind kind = pc.kind == PointKind::hyperbolic ? NodeKind::hyperbonode : NodeKind::ellipnode;
    NodeRecord n = refine_node(surface->jet, {x, y}, kind, tol);
    populate_invariants(surface->jet, n, tol);
    if (kind == NodeKind::ellipnode) {
      *out_json = dup(io::invariant_json(n, nullptr));
      return;
    }
    ExtendedReal diag;
    bool have = true;
    try {
      diag = rho_hyperbonode_diagonal(surface->jet, n.position, tol);
    } catch (const Error&) {
      have = false;
    }
    *out_json = dup(io::invariant_json(n, have ? &diag : nullptr));
  });
}

pu_status pu_plot(const pu_surface* surface, pu_window window, int grid, double tol_scale, char** out_svg) {
  if (!surface || !out_svg) return fail(PU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const Window w = window_of(window);
    check_grid(grid);
    const Tolerances tol = tolerances(tol_scale, w);
    const Traced t = trace_all(surface->jet, w, grid, tol);
    std::vector<NodeRecord> nodes = find_hyperbonodes(surface->jet, w, grid, tol);
    const auto e = find_ellipnodes(surface->jet, w, grid, tol);
    nodes.insert(nodes.end(), e.begin(), e.end());
    *out_svg = dup(io::render_svg(t.curves, nodes, w, &t.map));
  });
}

pu_status pu_sweep(const pu_family* family, pu_window window, int grid, double t0, double t1, int steps,
                   double tol_scale, char** out_csv, char** out_transitions) {
  if (!family || !out_csv) return fail(PU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    SweepOptions o;
    o.window = window_of(window);
    check_grid(grid);
    require(std::isfinite(t0) && std::isfinite(t1) && t1 > t0, "t range must satisfy t0 < t1");
    require(steps >= 2 && steps <= kMaxSteps, "steps must lie in [2, 100000]");
    o.grid = grid;
    o.t0 = t0;
    o.t1 = t1;
    o.steps = steps;
    o.tol = tolerances(tol_scale, o.window);
    const SweepReport r = sweep(family->family, o);
    char* csv = dup(io::sweep_csv(r));
    if (out_transitions) {
      try {
        *out_transitions = dup(io::transitions_json(r));
      } catch (...) {
        std::free(csv);
        throw;
      }
    }
    *out_csv = csv;
  });
}

pu_status pu_verify_builtin(char** out_report, int* all_passed) {
  if (!out_report || !all_passed) return fail(PU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::string report;
    bool ok = true;
    for (const CriterionResult& r : verify_builtin()) {
      char head[128];
      std::snprintf(head, sizeof head, "[%s] %2d %s (%.2f s): ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    r.seconds);
      report += head + r.detail + "\n";
      ok = ok && r.passed;
    }
    *out_report = dup(report);
    *all_passed = ok ? 1 : 0;
  });
}

}  // extern "C"
