// Runs the projumb executable and checks outputs and exit codes.

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(PROJUMB_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  const int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string data(const char* name) { return std::string(PROJUMB_DATA_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  const fs::path d = fs::temp_directory_path() / ("projumb_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("nodes of the prenormal example") {
  const Run r = run("nodes --surface " + data("prenormal.json") + " --window -0.5,0.5,-0.5,0.5 --grid 64");
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  REQUIRE(j.size() == 1);
  CHECK(j[0]["rho"].get<double>() == doctest::Approx(0.75).epsilon(1e-8));
  CHECK(j[0]["index"] == 1);

  const Run h = run("nodes --surface " + data("prenormal.json") +
                    " --window -0.5,0.5,-0.5,0.5 --grid 64 --kind ellipnodes");
  REQUIRE(h.status == 0);
  CHECK(json::parse(h.out).empty());
}

TEST_CASE("invariant and classify") {
  const Run r = run("invariant --surface " + data("prenormal.json") + " --at 0.01,0.01");
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j["rho"].get<double>() == doctest::Approx(0.75).epsilon(1e-8));
  CHECK(j["rho_diagonal"].get<double>() == doctest::Approx(0.75).epsilon(1e-8));

  const Run c = run("classify --surface " + data("disc.json") + " --at 0.1,0.2");
  REQUIRE(c.status == 0);
  CHECK(json::parse(c.out).is_object());
}

TEST_CASE("trace writes JSON and SVG files") {
  const fs::path d = scratch();
  const Run r = run("trace --surface " + data("disc.json") + " --window -2,2,-2,2 --grid 96 -o " +
                    (d / "t.json").string() + " --svg " + (d / "t.svg").string());
  REQUIRE(r.status == 0);
  CHECK(r.out.empty());
  const json j = json::parse(slurp(d / "t.json"));
  CHECK(j["curves"][0]["closed"] == json::array({true}));
  const std::string svg = slurp(d / "t.svg");
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  fs::remove_all(d);
}

TEST_CASE("plot and sweep are deterministic") {
  const std::string plot = "plot --surface " + data("disc.json") + " --window -2,2,-2,2 --grid 64";
  const Run a = run(plot);
  REQUIRE(a.status == 0);
  CHECK(a.out == run(plot).out);

  const fs::path d = scratch();
  const std::string sweep = "sweep --family " + data("double_hyperbonode_family.json") +
                            " --window -1,1,-1,1 --grid 32 --t-range 0.5,1.5 --steps 6 --transitions " +
                            (d / "tr.json").string();
  const Run s = run(sweep);
  REQUIRE(s.status == 0);
  CHECK(s.out.rfind("t,component_id,", 0) == 0);
  const std::string tr = slurp(d / "tr.json");
  CHECK(json::parse(tr).is_array());
  CHECK(s.out == run(sweep).out);
  CHECK(tr == slurp(d / "tr.json"));
  fs::remove_all(d);
}

TEST_CASE("tolerance scale is accepted and validated") {
  const std::string base = "nodes --surface " + data("prenormal.json") + " --window -0.5,0.5,-0.5,0.5 --grid 32";
  const Run r = run(base + " --tol-scale 10");
  REQUIRE(r.status == 0);
  CHECK(json::parse(r.out).size() == 1);
  CHECK(run(base + " --tol-scale 0").status == 1);
  CHECK(run(base + " --tol-scale -1").status == 1);
}

TEST_CASE("exit codes") {
  const fs::path d = scratch();
  CHECK(run("").status == 1);
  CHECK(run("bogus").status == 1);
  CHECK(run("nodes").status == 1);
  CHECK(run("nodes --surface " + (d / "missing.json").string()).status == 1);
  CHECK(run("nodes --surface " + data("disc.json") + " --grid 4").status == 1);
  CHECK(run("nodes --surface " + data("disc.json") + " --window 1,-1,0,1").status == 1);
  CHECK(run("sweep --family " + data("flec_family.json") + " --t-range 1,0").status == 1);

  {
    std::ofstream(d / "bad.json") << "{\"terms\": [[1, 1]]}";
  }
  CHECK(run("nodes --surface " + (d / "bad.json").string()).status == 1);

  {
    std::ofstream(d / "cubic.json") << "{\"terms\": [[1, 1, 1], [3, 0, 1]]}";
  }
  CHECK(run("invariant --surface " + (d / "cubic.json").string() + " --at 0.3,0.2").status == 2);

  CHECK(run("--version").status == 0);
  CHECK(run("--help").status == 0);
  fs::remove_all(d);
}
