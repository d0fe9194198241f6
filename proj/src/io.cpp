#include "projumb/io.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "json.hpp"
#include "projumb/error.hpp"

namespace projumb::io {

namespace {

using nlohmann::json;

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::parse, what); }

json parse_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    parse_error(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) parse_error("top level must be an object");
  if (!doc.contains("terms") || !doc["terms"].is_array()) parse_error("missing \"terms\" array");
  return doc;
}

int read_degree(const json& doc) {
  if (!doc.contains("degree")) return MongeJet::kDefaultDegree;
  const json& d = doc["degree"];
  if (!d.is_number_integer()) parse_error("\"degree\" must be an integer");
  const int n = d.get<int>();
  if (n < MongeJet::kMinDegree || n > MongeJet::kMaxDegree)
    parse_error("\"degree\" must lie in [" + std::to_string(MongeJet::kMinDegree) + ", " +
                std::to_string(MongeJet::kMaxDegree) + "]");
  return n;
}

std::pair<int, int> read_exponents(const json& term, int degree, std::size_t k) {
  const std::string where = "term " + std::to_string(k);
  if (!term.is_array() || term.size() != 3) parse_error(where + ": expected [i, j, c]");
  if (!term[0].is_number_integer() || !term[1].is_number_integer())
    parse_error(where + ": exponents must be integers");
  const int i = term[0].get<int>(), j = term[1].get<int>();
  if (i < 0 || j < 0) parse_error(where + ": negative exponent");
  if (i + j > degree) parse_error(where + ": total degree exceeds " + std::to_string(degree));
  return {i, j};
}

double read_coefficient(const json& c, const std::string& where) {
  if (!c.is_number()) parse_error(where + ": coefficient must be a number");
  const double v = c.get<double>();
  if (!std::isfinite(v)) parse_error(where + ": coefficient must be finite");
  return v;
}

// Minimal writer; numbers go through number().
class Writer {
 public:
  Writer& raw(std::string_view s) {
    out_ += s;
    return *this;
  }
  Writer& num(double v) { return raw(number(v)); }
  Writer& integer(long long v) { return raw(std::to_string(v)); }
  Writer& boolean(bool b) { return raw(b ? "true" : "false"); }
  Writer& str(std::string_view s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\t': out_ += "\\t"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out_ += buf;
          } else {
            out_ += c;
          }
      }
    }
    out_ += '"';
    return *this;
  }
  Writer& key(std::string_view k) {
    str(k);
    out_ += ": ";
    return *this;
  }
  Writer& point(Point2 p) { return raw("[").num(p.x).raw(", ").num(p.y).raw("]"); }
  Writer& extended(ExtendedReal r) { return r.infinite ? raw("null") : num(r.value); }
  std::string take() { return std::move(out_); }
  std::size_t size() const { return out_.size(); }

 private:
  std::string out_;
};

void write_node(Writer& w, const NodeRecord& n) {
  w.raw("{").key("kind").str(to_string(n.kind));
  w.raw(", ").key("x").num(n.position.x);
  w.raw(", ").key("y").num(n.position.y);
  w.raw(", ").key("rho").extended(n.rho);
  w.raw(", ").key("parity").integer(n.parity);
  w.raw(", ").key("index").integer(n.index);
  w.raw(", ").key("residual").num(n.residual);
  w.raw(", ").key("flags").raw("[");
  bool first = true;
  auto flag = [&](bool on, const char* name) {
    if (!on) return;
    if (!first) w.raw(", ");
    w.str(name);
    first = false;
  };
  flag(n.flags.double_node, "double");
  flag(n.flags.flec_hyperbonode, "flec-hyperbonode");
  flag(n.flags.non_generic, "non-generic");
  w.raw("]}");
}

void write_curve(Writer& w, const TracedCurve& c) {
  w.raw("{").key("kind").str(to_string(c.kind));
  w.raw(", ").key("segments").raw("[");
  for (std::size_t s = 0; s < c.segments.size(); ++s) {
    if (s) w.raw(", ");
    w.raw("[");
    const Polyline& pl = c.segments[s];
    for (std::size_t k = 0; k < pl.vertices.size(); ++k) {
      if (k) w.raw(", ");
      w.point(pl.vertices[k].pos);
    }
    // A closed polyline repeats its first vertex.
    if (pl.closed && !pl.vertices.empty()) w.raw(", ").point(pl.vertices.front().pos);
    w.raw("]");
  }
  w.raw("]");
  w.raw(", ").key("residual").num(c.refinement_residual);
  w.raw(", ").key("closed").raw("[");
  for (std::size_t s = 0; s < c.segments.size(); ++s) w.raw(s ? ", " : "").boolean(c.segments[s].closed);
  w.raw("]");
  w.raw(", ").key("gaps").integer(c.gaps);
  w.raw(", ").key("dropped").integer(c.dropped);
  w.raw(", ").key("label_failures").integer(c.label_failures);
  w.raw(", ").key("degenerate").boolean(c.degenerate);
  w.raw("}");
}

// Window to viewBox.
struct Frame {
  Window w;
  double width = 800.0, height = 800.0;
  double X(double x) const { return (x - w.xmin) / w.width() * width; }
  double Y(double y) const { return (w.ymax - y) / w.height() * height; }
};

std::string path_data(const Frame& f, const Polyline& pl) {
  Writer w;
  for (std::size_t k = 0; k < pl.vertices.size(); ++k) {
    const Point2 p = pl.vertices[k].pos;
    w.raw(k ? " L " : "M ").num(f.X(p.x)).raw(" ").num(f.Y(p.y));
  }
  if (pl.closed) w.raw(" Z");
  return w.take();
}

}  // namespace

std::string number(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0) v = 0.0;  // no negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

MongeJet parse_surface(std::string_view text) {
  const json doc = parse_document(text);
  const int degree = read_degree(doc);
  std::vector<JetTerm> terms;
  std::set<std::pair<int, int>> seen;
  for (std::size_t k = 0; k < doc["terms"].size(); ++k) {
    const json& t = doc["terms"][k];
    const auto [i, j] = read_exponents(t, degree, k);
    if (!seen.insert({i, j}).second) parse_error("duplicate term x^" + std::to_string(i) + " y^" + std::to_string(j));
    terms.push_back({i, j, read_coefficient(t[2], "term " + std::to_string(k))});
  }
  return MongeJet::from_terms(terms, degree);
}

FamilyJet parse_family(std::string_view text) {
  const json doc = parse_document(text);
  const int degree = read_degree(doc);
  std::map<std::pair<int, int>, std::vector<double>> terms;
  for (std::size_t k = 0; k < doc["terms"].size(); ++k) {
    const json& t = doc["terms"][k];
    const auto ij = read_exponents(t, degree, k);
    const std::string where = "term " + std::to_string(k);
    if (!t[2].is_array() || t[2].empty()) parse_error(where + ": expected a coefficient list [c0, c1, ...]");
    std::vector<double> c;
    for (const json& v : t[2]) c.push_back(read_coefficient(v, where));
    if (!terms.emplace(ij, std::move(c)).second)
      parse_error("duplicate term x^" + std::to_string(ij.first) + " y^" + std::to_string(ij.second));
  }
  return FamilyJet(std::move(terms), degree);
}

std::string surface_json(const MongeJet& jet) {
  Writer w;
  w.raw("{").key("degree").integer(jet.max_degree()).raw(", ").key("terms").raw("[");
  bool first = true;
  for (const auto& [ij, c] : jet.terms()) {
    w.raw(first ? "[" : ", [").integer(ij.first).raw(", ").integer(ij.second).raw(", ").num(c).raw("]");
    first = false;
  }
  w.raw("]}");
  return w.take();
}

std::string family_json(const FamilyJet& family) {
  Writer w;
  w.raw("{").key("degree").integer(family.max_degree()).raw(", ").key("terms").raw("[");
  bool first = true;
  for (const auto& [ij, cs] : family.terms()) {
    w.raw(first ? "[" : ", [").integer(ij.first).raw(", ").integer(ij.second).raw(", [");
    for (std::size_t k = 0; k < cs.size(); ++k) w.raw(k ? ", " : "").num(cs[k]);
    w.raw("]]");
    first = false;
  }
  w.raw("]}");
  return w.take();
}

std::string frame_json(const AsymptoticFrame& f) {
  Writer w;
  w.raw("{").key("x").num(f.point.x).raw(", ").key("y").num(f.point.y);
  w.raw(", ").key("kind").str(to_string(f.kind));
  w.raw(", ").key("discriminant").num(f.discriminant);
  w.raw(", ").key("directions").raw("[");
  for (int k = 0; k < f.count; ++k) {
    const Vec2 u = f.directions[k].unit();
    if (k) w.raw(", ");
    w.raw("{").key("dx").num(u.x).raw(", ").key("dy").num(u.y);
    w.raw(", ").key("label").str(to_string(f.labels[k])).raw("}");
  }
  w.raw("]");
  if (f.kind == PointKind::elliptic)
    w.raw(", ").key("complex_slope").raw("[").num(f.complex_slope.real()).raw(", ").num(f.complex_slope.imag()).raw("]");
  w.raw("}");
  return w.take();
}

std::string curve_json(const TracedCurve& curve) {
  Writer w;
  write_curve(w, curve);
  return w.take();
}

std::string trace_json(const std::vector<TracedCurve>& curves, const ComponentMap* components) {
  Writer w;
  w.raw("{").key("curves").raw("[");
  for (std::size_t k = 0; k < curves.size(); ++k) {
    w.raw(k ? ",\n  " : "\n  ");
    write_curve(w, curves[k]);
  }
  w.raw("\n]");
  if (components) {
    w.raw(",\n").key("components").raw("[");
    for (std::size_t k = 0; k < components->components.size(); ++k) {
      const DomainComponent& c = components->components[k];
      w.raw(k ? ",\n  {" : "\n  {").key("id").integer(c.id);
      w.raw(", ").key("kind").str(to_string(c.kind));
      w.raw(", ").key("touches_boundary").boolean(c.touches_boundary);
      w.raw(", ").key("pixels").integer(c.pixels);
      w.raw(", ").key("euler_characteristic");
      if (c.euler_characteristic)
        w.integer(*c.euler_characteristic);
      else
        w.raw("null");
      w.raw(", ").key("pixel_euler").integer(c.pixel_euler);
      w.raw(", ").key("boundary_loops").integer(c.boundary_loops);
      w.raw(", ").key("sample").point(c.sample).raw("}");
    }
    w.raw("\n]");
  }
  w.raw("}\n");
  return w.take();
}

std::string node_json(const NodeRecord& node) {
  Writer w;
  write_node(w, node);
  return w.take();
}

std::string invariant_json(const NodeRecord& node, const ExtendedReal* rho_diagonal) {
  std::string s = node_json(node);
  s.pop_back();
  Writer w;
  w.raw(", ").key("rho_diagonal");
  if (rho_diagonal)
    w.extended(*rho_diagonal);
  else
    w.raw("null");
  w.raw("}\n");
  return s + w.take();
}

std::string nodes_json(const std::vector<NodeRecord>& nodes) {
  Writer w;
  w.raw("[");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    w.raw(k ? ",\n  " : "\n  ");
    write_node(w, nodes[k]);
  }
  w.raw(nodes.empty() ? "]\n" : "\n]\n");
  return w.take();
}

std::string sweep_csv(const SweepReport& report) {
  Writer w;
  w.raw("t,component_id,n_hyperbonodes,index_sum,n_ellipnodes,sign_sum,flags\n");
  for (const SweepSample& s : report.samples) {
    for (const ComponentSummary& c : s.components) {
      std::string flags;
      auto add = [&](bool on, const char* name) {
        if (!on) return;
        if (!flags.empty()) flags += ';';
        flags += name;
      };
      add(c.kind == PointKind::hyperbolic, "hyperbolic");
      add(c.kind == PointKind::elliptic, "elliptic");
      add(c.touches_boundary, "boundary");
      add(c.flagged, "degenerate-node");
      w.num(s.t).raw(",").integer(c.id).raw(",").integer(c.n_hyperbonodes).raw(",").integer(c.index_sum);
      w.raw(",").integer(c.n_ellipnodes).raw(",").integer(c.sign_sum).raw(",").raw(flags).raw("\n");
    }
  }
  return w.take();
}

std::string transitions_json(const SweepReport& report) {
  Writer w;
  w.raw("[");
  for (std::size_t k = 0; k < report.transitions.size(); ++k) {
    const Transition& t = report.transitions[k];
    w.raw(k ? ",\n  {" : "\n  {").key("kind").str(to_string(t.kind));
    w.raw(", ").key("sample_lo").integer(t.sample_lo);
    w.raw(", ").key("sample_hi").integer(t.sample_hi);
    w.raw(", ").key("t_lo").num(t.t_lo);
    w.raw(", ").key("t_hi").num(t.t_hi);
    w.raw(", ").key("x").num(t.location.x);
    w.raw(", ").key("y").num(t.location.y);
    w.raw(", ").key("localized").boolean(t.localized);
    w.raw(", ").key("flagged").boolean(t.flagged);
    w.raw(", ").key("contract_ok");
    if (t.contract_ok)
      w.boolean(*t.contract_ok);
    else
      w.raw("null");
    w.raw(", ").key("note").str(t.note).raw("}");
  }
  w.raw(report.transitions.empty() ? "]\n" : "\n]\n");
  return w.take();
}

std::string render_svg(const std::vector<TracedCurve>& curves, const std::vector<NodeRecord>& nodes,
                       const Window& window, const ComponentMap* components) {
  if (!window.valid()) throw Error(ErrorCode::invalid_argument, "degenerate window");
  Frame f{window};
  f.height = f.width * window.height() / window.width();
  Writer w;
  w.raw("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
  w.raw("<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" version=\"1.1\"");
  w.raw(" width=\"").num(f.width).raw("\" height=\"").num(f.height).raw("\" viewBox=\"0 0 ");
  w.num(f.width).raw(" ").num(f.height).raw("\">\n");
  w.raw("<rect x=\"0\" y=\"0\" width=\"").num(f.width).raw("\" height=\"").num(f.height);
  w.raw("\" fill=\"#ffffff\" stroke=\"none\"/>\n");

  if (components && components->grid > 0) {
    // Row runs of hyperbolic grid vertices, each vertex a cell-sized pixel.
    const int n = components->grid;
    const double hx = window.width() / n, hy = window.height() / n;
    // One path, so adjacent rows do not leave antialiasing seams.
    Writer d;
    for (int j = 0; j <= n; ++j) {
      int i = 0;
      while (i <= n) {
        auto hyperbolic = [&](int ii) {
          const int l = components->label[static_cast<std::size_t>(j) * (n + 1) + ii];
          return l >= 0 && components->components[l].kind == PointKind::hyperbolic;
        };
        if (!hyperbolic(i)) {
          ++i;
          continue;
        }
        int e = i;
        while (e + 1 <= n && hyperbolic(e + 1)) ++e;
        const double x0 = std::max(window.xmin, window.xmin + (i - 0.5) * hx);
        const double x1 = std::min(window.xmax, window.xmin + (e + 0.5) * hx);
        const double y1 = std::min(window.ymax, window.ymin + (j + 0.5) * hy);
        const double y0 = std::max(window.ymin, window.ymin + (j - 0.5) * hy);
        d.raw(d.size() ? " M " : "M ").num(f.X(x0)).raw(" ").num(f.Y(y1));
        d.raw(" H ").num(f.X(x1)).raw(" V ").num(f.Y(y0)).raw(" H ").num(f.X(x0)).raw(" Z");
        i = e + 1;
      }
    }
    if (d.size()) w.raw("<path class=\"hyperbolic\" fill=\"#c8c8c8\" stroke=\"none\" d=\"").raw(d.take()).raw("\"/>\n");
  }

  int left_id = 0;
  std::string left_defs, left_uses;
  for (const TracedCurve& c : curves) {
    if (c.kind == CurveKind::flecnodal_left) {
      for (const Polyline& pl : c.segments) {
        if (pl.vertices.empty()) continue;
        const std::string id = "left" + std::to_string(left_id++);
        left_defs += "<path id=\"" + id + "\" d=\"" + path_data(f, pl) + "\"/>\n";
        left_uses += "<use xlink:href=\"#" + id + "\" stroke=\"#000000\" stroke-width=\"3.5\"/>\n";
        left_uses += "<use xlink:href=\"#" + id + "\" stroke=\"#ffffff\" stroke-width=\"1.5\"/>\n";
      }
      continue;
    }
    const bool parabolic = c.kind == CurveKind::parabolic;
    w.raw("<g class=\"").raw(to_string(c.kind)).raw("\" fill=\"none\" stroke=\"");
    w.raw(parabolic ? "#505050" : "#000000").raw("\" stroke-width=\"").raw(parabolic ? "2" : "1.5").raw("\">\n");
    for (const Polyline& pl : c.segments)
      if (!pl.vertices.empty()) w.raw("<path d=\"").raw(path_data(f, pl)).raw("\"/>\n");
    w.raw("</g>\n");
  }
  if (left_id > 0) {
    w.raw("<defs>\n").raw(left_defs).raw("</defs>\n");
    w.raw("<g class=\"flecnodal-left\" fill=\"none\">\n").raw(left_uses).raw("</g>\n");
  }

  if (!nodes.empty()) {
    w.raw("<g class=\"nodes\" stroke=\"#000000\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"12\">\n");
    for (const NodeRecord& n : nodes) {
      const double X = f.X(n.position.x), Y = f.Y(n.position.y);
      if (n.kind == NodeKind::hyperbonode)
        w.raw("<circle cx=\"").num(X).raw("\" cy=\"").num(Y).raw("\" r=\"5\" fill=\"#ffffff\"/>\n");
      else
        w.raw("<rect x=\"").num(X - 4.5).raw("\" y=\"").num(Y - 4.5).raw("\" width=\"9\" height=\"9\" fill=\"#808080\"/>\n");
      const char* sign = n.index > 0 ? "+" : n.index < 0 ? "-" : "0";
      w.raw("<text x=\"").num(X + 7).raw("\" y=\"").num(Y - 7).raw("\" stroke=\"none\" fill=\"#000000\">");
      w.raw(sign).raw("</text>\n");
    }
    w.raw("</g>\n");
  }
  w.raw("<rect x=\"0\" y=\"0\" width=\"").num(f.width).raw("\" height=\"").num(f.height);
  w.raw("\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n");
  w.raw("</svg>\n");
  return w.take();
}

}  // namespace projumb::io
