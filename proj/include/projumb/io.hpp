#pragma once

// Surface/family JSON ingestion and the JSON, CSV and SVG artifacts.
// Every number is written with 17 significant digits; a point at infinity
// is written as null.

#include <string>
#include <string_view>
#include <vector>

#include "projumb/curve_tracing.hpp"
#include "projumb/family_sweep.hpp"
#include "projumb/jets.hpp"
#include "projumb/local_geometry.hpp"
#include "projumb/nodes.hpp"

namespace projumb::io {

/// "%.17g", or "null" for a non-finite value.
std::string number(double v);

/// {"degree": n, "terms": [[i, j, c], ...]}; throws parse.
MongeJet parse_surface(std::string_view text);
/// {"degree": n, "terms": [[i, j, [c0, c1, ...]], ...]}; throws parse.
FamilyJet parse_family(std::string_view text);

std::string surface_json(const MongeJet& jet);
std::string family_json(const FamilyJet& family);

std::string frame_json(const AsymptoticFrame& frame);

/// {"kind": "...", "segments": [[[x,y],...],...], "residual": r}
std::string curve_json(const TracedCurve& curve);
/// {"curves": [...], "components": [...]}
std::string trace_json(const std::vector<TracedCurve>& curves, const ComponentMap* components);

std::string node_json(const NodeRecord& node);
std::string nodes_json(const std::vector<NodeRecord>& nodes);
/// Node object plus "rho_diagonal" (null when unavailable or infinite).
std::string invariant_json(const NodeRecord& node, const ExtendedReal* rho_diagonal);

/// Header t,component_id,n_hyperbonodes,index_sum,n_ellipnodes,sign_sum,flags;
/// one row per sample and component, LF line endings.
std::string sweep_csv(const SweepReport& report);
std::string transitions_json(const SweepReport& report);

/// SVG 1.1 figure. The hyperbolic domain is shaded when `components` is
/// given; the elliptic domain stays white.
std::string render_svg(const std::vector<TracedCurve>& curves, const std::vector<NodeRecord>& nodes,
                       const Window& window, const ComponentMap* components = nullptr);

}  // namespace projumb::io
