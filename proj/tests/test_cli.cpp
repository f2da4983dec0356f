#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "linkeng/mapfn.hpp"
#include "linkeng/scenario.hpp"

using namespace linkeng;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path kWork = fs::temp_directory_path() / "linkcli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(LINKCLI_PATH) + " " + args +
                          " > " + (kWork / "stdout.txt").string() +
                          " 2> " + (kWork / "stderr.txt").string();
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void put(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

json report(const fs::path& p) { return json::parse(slurp(p)); }

struct Setup {
  Setup() { fs::create_directories(kWork); }
} setup;

}  // namespace

TEST_CASE("exit 0: linking number of a built-in pair") {
  CHECK(run("lk --scenario hopf --report " + (kWork / "r.json").string()) ==
        0);
  json r = report(kWork / "r.json");
  CHECK(r["schema"] == "linkeng-report/1");
  CHECK(r["results"]["lk"] == -1);
  CHECK(r["results"]["ray"] == -1);
  CHECK(r["results"]["regular_value"] == -1);
  CHECK(std::abs(r["results"]["gauss_quadrature"].get<double>() + 1.0) <=
        1e-2);
  CHECK(slurp(kWork / "stdout.txt").find("= -1") != std::string::npos);
}

TEST_CASE("exit 2: tangential pair is rejected, never silently counted") {
  CHECK(run("lk --scenario tangent-pair") == 2);
  CHECK(slurp(kWork / "stderr.txt").find("non-transverse") !=
        std::string::npos);
}

TEST_CASE("exit 3: parse and validation failures") {
  CHECK(run("lk --scenario " + (kWork / "missing.scn").string()) == 3);
  put(kWork / "bad.scn", "this is not a declaration\n");
  CHECK(run("lk --scenario " + (kWork / "bad.scn").string()) == 3);
  CHECK(run("lk --scenario hopf --pair nope") == 3);
  CHECK(run("no-such-subcommand") == 3);
  CHECK(run("lk --scenario hopf --method nonsense") == 3);
  CHECK(run("demo no-such-demo") == 3);
}

TEST_CASE("exit 4: cross-method disagreement is reported, not hidden") {
  // a solver deliberately crippled by its config misses all zeros; the
  // independent quadrature still sees the true value
  put(kWork / "disagree.scn", R"(
map f1(x: circle) -> 3 = ((2 + cos(3*x))*cos x, (2 + cos(3*x))*sin x, sin(3*x))
map f2(y: circle) -> 3 = ((2 - cos(3*y))*cos y, (2 - cos(3*y))*sin y, 0 - sin(3*y))
pair main = f1 f2
config resolution 3
config max_refine_depth 0
config max_newton_iter 2
)");
  CHECK(run("lk --scenario " + (kWork / "disagree.scn").string()) == 4);
  CHECK(slurp(kWork / "stderr.txt").find("disagreement") !=
        std::string::npos);
}

TEST_CASE("exit 5: quadrature instability is surfaced") {
  // linked pair passing within 0.01: the Gauss integrand is too sharp for
  // the fixed quadrature grid and fails its refinement check
  put(kWork / "near.scn", R"(
map f1(x: circle) -> 3 = (cos x, sin x, 0)
map f2(y: circle) -> 3 = (1 + 0.01*cos y, 0, 0.01*sin y)
pair main = f1 f2
)");
  CHECK(run("lk --scenario " + (kWork / "near.scn").string() +
            " --method gauss") == 5);
}

TEST_CASE("same scenario and seed give a byte-identical report") {
  const std::string base =
      "lk --scenario torus-2-4 --seed 11 --report ";
  CHECK(run(base + (kWork / "d1.json").string()) == 0);
  CHECK(run(base + (kWork / "d2.json").string()) == 0);
  auto strip = [](std::string s) {
    const auto pos = s.find("wall_time");
    REQUIRE(pos != std::string::npos);
    return s.substr(0, pos);
  };
  CHECK(strip(slurp(kWork / "d1.json")) == strip(slurp(kWork / "d2.json")));
}

TEST_CASE("double points of a plane-circle crossing pair") {
  put(kWork / "cross.scn", R"(
map f1(x: circle) -> 2 = (cos x, sin x)
map f2(y: circle) -> 2 = (2 + 2*cos y, 2*sin y)
pair main = f1 f2
)");
  CHECK(run("double-points --scenario " + (kWork / "cross.scn").string() +
            " --report " + (kWork / "dp.json").string()) == 0);
  json r = report(kWork / "dp.json");
  CHECK(r["results"]["dimension"] == 0);
  CHECK(r["results"]["count"] == 2);

  CHECK(run("double-points --scenario unlink2 --report " +
            (kWork / "dp0.json").string()) == 0);
  CHECK(report(kWork / "dp0.json")["results"]["count"] == 0);
}

TEST_CASE("whitney export round trip: polyline points satisfy the original "
          "residual tolerance") {
  const fs::path exp = kWork / "exp";
  fs::remove_all(exp);
  CHECK(run("whitney --scenario borromean --map H23 --export-dir " +
            exp.string() + " --report " + (kWork / "w.json").string()) == 0);
  json r = report(kWork / "w.json");
  CHECK(r["results"]["circle_count"] == 1);
  CHECK(fs::exists(exp / "whitney_disk.obj"));

  // re-sample the exported parameter-space polyline through the map
  Scenario sc = builtin_scenario("borromean");
  MapFn gap = diagonal_gap(MapFn(sc.map("H23")));
  std::ifstream csv(exp / "whitney_circle_0.csv");
  REQUIRE(csv.good());
  std::string line;
  int rows = 0;
  double worst = 0;
  while (std::getline(csv, line)) {
    std::istringstream ls(line);
    Vec u(4);
    char comma;
    ls >> u[0] >> comma >> u[1] >> comma >> u[2] >> comma >> u[3];
    worst = std::max(worst, gap.eval(u).norm());
    ++rows;
  }
  CHECK(rows > 100);
  CHECK(worst < 1e-8);

  // empty case: no mesh files written
  const fs::path exp2 = kWork / "exp2";
  fs::remove_all(exp2);
  CHECK(run("whitney --scenario borromean --map H12 --export-dir " +
            exp2.string()) == 0);
  CHECK(!fs::exists(exp2 / "whitney_disk.obj"));
}

TEST_CASE("obstruct on the unlink is empty and exits cleanly") {
  CHECK(run("obstruct --scenario unlink3 --report " +
            (kWork / "ob.json").string()) == 0);
  json r = report(kWork / "ob.json");
  CHECK(r["results"]["mod2_total"] == 0);
  CHECK(r["results"]["signed_total"] == 0);
  for (const auto& p : r["results"]["pieces"]) CHECK(p["count"] == 0);
}
