#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "linkeng/link2.hpp"
#include "linkeng/scenario.hpp"

using namespace linkeng;

TEST_CASE("scenario grammar round trip") {
  Scenario sc = parse_scenario(R"(# comment
map f1(x: circle) -> 3 = (cos x, sin x, 0)
map f2(y: circle) -> 3 = (4 + cos y, sin y, 0)  # trailing comment
pair main = f1 f2
unoriented f2
config resolution 32
config boundary_margin 0.01
seed 99
)");
  CHECK(sc.maps.size() == 2);
  CHECK(sc.pairs.size() == 1);
  CHECK(sc.cfg.resolution == 32);
  CHECK(sc.cfg.boundary_margin == doctest::Approx(0.01));
  CHECK(sc.cfg.seed == 99);
  LinkPair p = sc.link_pair("main");
  CHECK(p.oriented1);
  CHECK(!p.oriented2);
}

TEST_CASE("parse errors carry line information") {
  CHECK_THROWS_AS(parse_scenario("bogus declaration\n"), SyntaxError);
  CHECK_THROWS_AS(parse_scenario("pair p = a\n"), SyntaxError);
  CHECK_THROWS_AS(parse_scenario("config no_such_key 1\n"), SyntaxError);
  CHECK_THROWS_AS(parse_scenario("seed notanumber\n"), SyntaxError);
  CHECK_THROWS_AS(
      parse_scenario("map f(x: circle) -> 1 = (cos x)\n"
                     "map f(x: circle) -> 1 = (sin x)\n"),
      SyntaxError);
  // malformed DSL inside a map line
  CHECK_THROWS_AS(parse_scenario("map f(x circle) -> 1 = (cos x)\n"),
                  SyntaxError);
  try {
    parse_scenario("map f(x: circle) -> 1 = (cos x)\n\nbroken here\n");
    CHECK(false);
  } catch (const SyntaxError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("undefined references and dimension mismatches are rejected") {
  CHECK_THROWS_AS(parse_scenario("pair p = a b\n"), UnknownIdentifier);
  CHECK_THROWS_AS(parse_scenario(R"(
map f1(x: circle) -> 3 = (cos x, sin x, 0)
map f2(y: circle) -> 2 = (cos y, sin y)
pair p = f1 f2
)"),
                  ValidationError);
  CHECK_THROWS_AS(parse_scenario(R"(
map f1(x: circle) -> 2 = (cos x, sin x)
triple t = f1 f1 f1
)"),
                  ValidationError);
  Scenario sc = parse_scenario("map f(x: circle) -> 1 = (cos x)\n");
  CHECK_THROWS_AS(sc.map("g"), UnknownIdentifier);
  CHECK_THROWS_AS(sc.link_pair("none"), UnknownIdentifier);
  CHECK_THROWS_AS(sc.t2path("none"), UnknownIdentifier);
}

TEST_CASE("built-in library") {
  auto names = builtin_scenario_names();
  CHECK(names.size() == 8);
  for (const auto& n : names) {
    CAPTURE(n);
    CHECK(is_builtin_scenario(n));
    CHECK_NOTHROW(builtin_scenario(n));
  }
  CHECK(!is_builtin_scenario("no-such"));
  CHECK_THROWS_AS(builtin_scenario("no-such"), UnknownIdentifier);

  SolverConfig cfg;
  LinkPair hopf = builtin_scenario("hopf").link_pair("main");
  CHECK(lk_via_ray(hopf, Vec(), cfg, 3) == -1);

  // the lift declarations produce validated family data
  CHECK_NOTHROW(builtin_scenario("borromean").t2path("main"));
  CHECK_NOTHROW(builtin_scenario("unlink3").t2path("main"));

  // unoriented declarations reach the family orientation flags
  Scenario sc = builtin_scenario("borromean");
  sc.unoriented.insert("F2");
  T2Path path = sc.t2path("main");
  CHECK(path.oriented[0]);
  CHECK(!path.oriented[1]);
}
