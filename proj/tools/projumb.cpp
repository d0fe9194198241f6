// projumb command-line front end. Exit codes: 0 success, 1 usage or input
// parse error, 2 numerical failure.

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "projumb.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumeric = 2 };

struct Failure {
  int code;
  std::string message;
};

struct Config {
  std::string surface, family;
  std::string output, svg, csv, transitions;
  std::vector<double> window{-1, 1, -1, 1};
  std::vector<double> at{0, 0};
  std::vector<double> t_range{0, 1};
  std::string kinds = "all";
  std::string suite = "builtin";
  int grid = 128;
  int steps = 11;
  double tol_scale = 1.0;
};

struct SurfaceDeleter {
  void operator()(pu_surface* s) const { pu_surface_free(s); }
};
struct FamilyDeleter {
  void operator()(pu_family* f) const { pu_family_free(f); }
};
struct StringDeleter {
  void operator()(char* s) const { pu_string_free(s); }
};
using Text = std::unique_ptr<char, StringDeleter>;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kUsage, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const char* text) {
  if (path.empty() || path == "-") {
    std::fputs(text, stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{kUsage, "cannot write " + path};
  out << text;
  if (!out) throw Failure{kUsage, "write failed: " + path};
}

void check(pu_status s, const char* what) {
  if (s == PU_OK) return;
  const int code = (s == PU_ERR_PARSE || s == PU_ERR_INVALID_ARGUMENT) ? kUsage : kNumeric;
  throw Failure{code, std::string(what) + ": " + pu_status_name(s) + ": " + pu_last_error()};
}

std::unique_ptr<pu_surface, SurfaceDeleter> load_surface(const std::string& path) {
  pu_surface* s = nullptr;
  check(pu_surface_from_json(read_file(path).c_str(), &s), path.c_str());
  return std::unique_ptr<pu_surface, SurfaceDeleter>(s);
}

pu_window window_of(const Config& c) {
  if (c.window.size() != 4) throw Failure{kUsage, "--window takes xmin,xmax,ymin,ymax"};
  if (!(c.window[0] < c.window[1] && c.window[2] < c.window[3]))
    throw Failure{kUsage, "--window must satisfy xmin < xmax and ymin < ymax"};
  return pu_window{c.window[0], c.window[1], c.window[2], c.window[3]};
}

void check_point(const Config& c) {
  if (c.at.size() != 2) throw Failure{kUsage, "--at takes x,y"};
}

int run_classify(const Config& c) {
  check_point(c);
  auto s = load_surface(c.surface);
  char* out = nullptr;
  check(pu_classify(s.get(), c.at[0], c.at[1], c.tol_scale, &out), "classify");
  Text t(out);
  write_text(c.output, t.get());
  return kOk;
}

int run_trace(const Config& c) {
  auto s = load_surface(c.surface);
  char* json = nullptr;
  char* svg = nullptr;
  check(pu_trace(s.get(), window_of(c), c.grid, c.tol_scale, &json, c.svg.empty() ? nullptr : &svg), "trace");
  Text j(json), v(svg);
  write_text(c.output, j.get());
  if (!c.svg.empty()) write_text(c.svg, v.get());
  return kOk;
}

int run_nodes(const Config& c) {
  int mask = 0;
  if (c.kinds == "hyperbonodes") mask = PU_HYPERBONODES;
  if (c.kinds == "ellipnodes") mask = PU_ELLIPNODES;
  if (c.kinds == "all") mask = PU_HYPERBONODES | PU_ELLIPNODES;
  auto s = load_surface(c.surface);
  char* out = nullptr;
  check(pu_nodes(s.get(), window_of(c), c.grid, mask, c.tol_scale, &out), "nodes");
  Text t(out);
  write_text(c.output, t.get());
  return kOk;
}

int run_invariant(const Config& c) {
  check_point(c);
  auto s = load_surface(c.surface);
  char* out = nullptr;
  check(pu_invariant(s.get(), c.at[0], c.at[1], c.tol_scale, &out), "invariant");
  Text t(out);
  write_text(c.output, t.get());
  return kOk;
}

int run_plot(const Config& c) {
  auto s = load_surface(c.surface);
  char* out = nullptr;
  check(pu_plot(s.get(), window_of(c), c.grid, c.tol_scale, &out), "plot");
  Text t(out);
  write_text(c.svg.empty() ? c.output : c.svg, t.get());
  return kOk;
}

int run_sweep(const Config& c) {
  if (c.t_range.size() != 2 || !(c.t_range[0] < c.t_range[1]))
    throw Failure{kUsage, "--t-range takes t0,t1 with t0 < t1"};
  pu_family* f = nullptr;
  check(pu_family_from_json(read_file(c.family).c_str(), &f), c.family.c_str());
  std::unique_ptr<pu_family, FamilyDeleter> family(f);
  char* csv = nullptr;
  char* tr = nullptr;
  check(pu_sweep(family.get(), window_of(c), c.grid, c.t_range[0], c.t_range[1], c.steps, c.tol_scale, &csv, &tr),
        "sweep");
  Text a(csv), b(tr);
  write_text(c.csv.empty() ? c.output : c.csv, a.get());
  if (!c.transitions.empty()) write_text(c.transitions, b.get());
  return kOk;
}

int run_verify(const Config& c) {
  if (c.suite != "builtin") throw Failure{kUsage, "unknown suite " + c.suite};
  char* report = nullptr;
  int passed = 0;
  check(pu_verify_builtin(&report, &passed), "verify");
  Text t(report);
  write_text(c.output, t.get());
  if (!passed) throw Failure{kNumeric, "verification failed"};
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  Config c;
  CLI::App app{"Projective umbilics of polynomial surfaces z = f(x,y)", "projumb"};
  app.set_version_flag("--version", std::string(pu_version()));
  app.require_subcommand(1);

  auto surface_opts = [&](CLI::App* cmd) {
    cmd->add_option("--surface", c.surface, "surface JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--tol-scale", c.tol_scale, "multiplier applied to every tolerance")
        ->check(CLI::PositiveNumber);
    cmd->add_option("-o,--output", c.output, "output path (default stdout)");
  };
  auto window_opts = [&](CLI::App* cmd) {
    cmd->add_option("--window", c.window, "xmin,xmax,ymin,ymax")->delimiter(',')->expected(4);
    cmd->add_option("--grid", c.grid, "grid cells per side")->check(CLI::Range(16, 4096));
  };

  CLI::App* classify = app.add_subcommand("classify", "point class, asymptotic directions and labels");
  surface_opts(classify);
  classify->add_option("--at", c.at, "x,y")->delimiter(',')->expected(2);

  CLI::App* trace = app.add_subcommand("trace", "parabolic and flecnodal curves");
  surface_opts(trace);
  window_opts(trace);
  trace->add_option("--svg", c.svg, "also write the SVG figure here");

  CLI::App* nodes = app.add_subcommand("nodes", "hyperbonodes and ellipnodes with their invariants");
  surface_opts(nodes);
  window_opts(nodes);
  nodes->add_option("--kind", c.kinds, "node kinds")
      ->check(CLI::IsMember({"all", "hyperbonodes", "ellipnodes"}));

  CLI::App* invariant = app.add_subcommand("invariant", "rho, parity and index of the node near a point");
  surface_opts(invariant);
  invariant->add_option("--at", c.at, "x,y")->delimiter(',')->expected(2);

  CLI::App* sweep = app.add_subcommand("sweep", "track nodes through a 1-parameter family");
  sweep->add_option("--family", c.family, "family JSON")->required()->check(CLI::ExistingFile);
  window_opts(sweep);
  sweep->add_option("--t-range", c.t_range, "t0,t1")->delimiter(',')->expected(2);
  sweep->add_option("--steps", c.steps, "number of samples")->check(CLI::Range(2, 100000));
  sweep->add_option("--tol-scale", c.tol_scale, "multiplier applied to every tolerance")->check(CLI::PositiveNumber);
  sweep->add_option("--csv", c.csv, "per-sample CSV (default stdout)");
  sweep->add_option("--transitions", c.transitions, "transition list JSON");
  sweep->add_option("-o,--output", c.output, "same as --csv");

  CLI::App* verify = app.add_subcommand("verify", "run the verification suite");
  verify->add_option("--suite", c.suite, "suite name")->check(CLI::IsMember({"builtin"}));
  verify->add_option("-o,--output", c.output, "report path (default stdout)");

  CLI::App* plot = app.add_subcommand("plot", "SVG figure of curves, domains and nodes");
  surface_opts(plot);
  window_opts(plot);
  plot->add_option("--svg", c.svg, "SVG path (default --output or stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (classify->parsed()) return run_classify(c);
    if (trace->parsed()) return run_trace(c);
    if (nodes->parsed()) return run_nodes(c);
    if (invariant->parsed()) return run_invariant(c);
    if (sweep->parsed()) return run_sweep(c);
    if (verify->parsed()) return run_verify(c);
    if (plot->parsed()) return run_plot(c);
  } catch (const Failure& f) {
    std::fprintf(stderr, "projumb: %s\n", f.message.c_str());
    return f.code;
  }
  return kUsage;
}
