#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linkeng/link2.hpp"

using namespace linkeng;

namespace {

LinkPair make_pair(const std::string& a, const std::string& b) {
  LinkPair p;
  p.f1 = parse_map(a);
  p.f2 = parse_map(b);
  return p;
}

LinkPair hopf() {
  return make_pair("f1(x: circle) -> 3 = (cos x, sin x, 0)",
                   "f2(y: circle) -> 3 = (1 + cos y, 0, sin y)");
}

LinkPair unlink2() {
  return make_pair("f1(x: circle) -> 3 = (cos x, sin x, 0)",
                   "f2(y: circle) -> 3 = (4 + cos y, sin y, 0)");
}

// (2,4) torus link: two curves winding twice around a common torus
LinkPair torus24() {
  return make_pair(
      "f1(x: circle) -> 3 = "
      "((2 + cos(2*x))*cos x, (2 + cos(2*x))*sin x, sin(2*x))",
      "f2(y: circle) -> 3 = "
      "((2 - cos(2*y))*cos y, (2 - cos(2*y))*sin y, 0 - sin(2*y))");
}

// two rings of a Borromean configuration, pairwise unlinked
LinkPair borr_pair() {
  return make_pair("f1(x: circle) -> 3 = (0, 2*cos x, sin x)",
                   "f2(y: circle) -> 3 = (cos y, 0, 2*sin y)");
}

int all_methods_agree(const LinkPair& p, const SolverConfig& cfg,
                      std::uint64_t seed) {
  const double g = lk_via_gauss_quadrature(p);
  const int ray = lk_via_ray(p, Vec(), cfg, seed);
  const int rv = lk_via_regular_value(p, Vec(), cfg, seed);
  const int hom = lk_via_homotopy(p, cfg, seed).signed_count();
  CHECK(std::abs(g - ray) < 1e-3);
  CHECK(rv == ray);
  CHECK(hom == ray);
  return ray;
}

}  // namespace

TEST_CASE("validation rejects non-linking dimensions") {
  LinkPair p = make_pair("f1(x: circle) -> 2 = (cos x, sin x)",
                         "f2(y: circle) -> 2 = (4 + cos y, sin y)");
  CHECK_THROWS_AS(p.validate_for_lk(), ValidationError);
  LinkPair q = make_pair("f1(x: circle) -> 3 = (cos x, sin x, 0)",
                         "f2(y: circle) -> 2 = (cos y, sin y)");
  CHECK_THROWS_AS(q.validate_for_lk(), ValidationError);
}

TEST_CASE("hopf link has linking number -1 by every method") {
  SolverConfig cfg;
  CHECK(all_methods_agree(hopf(), cfg, 7) == -1);
}

TEST_CASE("orientation reversal negates the linking number") {
  LinkPair p = hopf();
  Expression rev = parse_expression("0 - y", {"y"});
  p.f2 = precompose_circle(p.f2, 0, rev);
  SolverConfig cfg;
  CHECK(all_methods_agree(p, cfg, 7) == 1);
}

TEST_CASE("swapping the components preserves the linking number") {
  LinkPair p = hopf();
  std::swap(p.f1, p.f2);
  SolverConfig cfg;
  CHECK(all_methods_agree(p, cfg, 7) == -1);
}

TEST_CASE("split link has linking number 0 and no double points") {
  SolverConfig cfg;
  CHECK(all_methods_agree(unlink2(), cfg, 11) == 0);
  auto dp = double_points(unlink2(), cfg);
  CHECK(dp.dimension == 0);
  CHECK(dp.points.empty());
}

TEST_CASE("(2,4) torus link has linking number -2") {
  SolverConfig cfg;
  CHECK(all_methods_agree(torus24(), cfg, 3) == -2);
}

TEST_CASE("borromean ring pairs are algebraically unlinked") {
  SolverConfig cfg;
  CHECK(all_methods_agree(borr_pair(), cfg, 5) == 0);
  auto dp = double_points(borr_pair(), cfg);
  CHECK(dp.points.empty());
}

TEST_CASE("intersecting components are rejected") {
  LinkPair p = make_pair("f1(x: circle) -> 3 = (cos x, sin x, 0)",
                         "f2(y: circle) -> 3 = (1 + cos y, sin y, 0)");
  SolverConfig cfg;
  CHECK_THROWS_AS(lk_via_ray(p, Vec(), cfg, 1), NonTransverse);
}

TEST_CASE("homotopy endpoint must be a link map") {
  // a path that never separates the components: both ends equal the
  // overlapping configuration
  ParamMap f1 = parse_map("f1(x: circle) -> 3 = (cos x, sin x, 0)");
  ParamMap f2 = parse_map("f2(y: circle) -> 3 = (1 + cos y, sin y, 0)");
  DomainFactor t;
  t.kind = DomainFactor::Kind::Interval;
  t.name = "t";
  t.lo = 0.0;
  t.hi = 1.0;
  MapFn f1m(f1), f2m(f2);
  HomotopyPath path{
      MapFn(concat_domains(f1m.domain(), {t}), 3,
            [f1m]<typename T>(std::span<const T> u, std::span<T> out) {
              f1m.call(u.subspan(0, 1), out);
            }),
      MapFn(concat_domains(f2m.domain(), {t}), 3,
            [f2m]<typename T>(std::span<const T> u, std::span<T> out) {
              f2m.call(u.subspan(0, 1), out);
            })};
  SolverConfig cfg;
  CHECK_THROWS_AS(linking_manifold(path, cfg), EndpointNotLink);
}

TEST_CASE("witness paths join the basepoint images at the double point") {
  SolverConfig cfg;
  LinkPair p = hopf();
  HomotopyPath path = separation_homotopy(p, 7);
  auto r = linking_manifold(path, cfg);
  REQUIRE(r.dimension == 0);
  REQUIRE(!r.points.empty());
  const MapFn f1(p.f1), f2(p.f2);
  for (const auto& pt : r.points) {
    const int p1 = path.h1.dim_in() - 1, p2 = path.h2.dim_in() - 1;
    Vec x1 = pt.u.head(p1), x2 = pt.u.segment(p1, p2);
    const double t = pt.u[p1 + p2];
    auto w1 = witness_path(path.h1, x1, t, 16);
    auto w2 = witness_path(path.h2, x2, t, 16);
    REQUIRE(w1.size() == 17);
    REQUIRE(w2.size() == 17);  // endpoints inclusive
    // s = 0: the basepoint images of the original components
    CHECK((w1.front() - f1.eval(x1)).norm() < 1e-9);
    CHECK((w2.front() - f2.eval(x2)).norm() < 1e-9);
    // s = 1: both arrive at the same double point
    CHECK((w1.back() - w2.back()).norm() < 1e-7);
  }
}

TEST_CASE("gauss quadrature is stable under resolution doubling") {
  const double a = lk_via_gauss_quadrature(hopf(), 128);
  const double b = lk_via_gauss_quadrature(hopf(), 256);
  CHECK(std::abs(a - b) < 1e-3);
  CHECK(std::abs(a + 1.0) < 1e-4);
}

TEST_CASE("image distance sampling") {
  MapFn a{parse_map("f(x: circle) -> 3 = (cos x, sin x, 0)")};
  MapFn b{parse_map("g(y: circle) -> 3 = (4 + cos y, sin y, 0)")};
  const double d = min_image_distance(a, b, 256);
  CHECK(d == doctest::Approx(2.0).epsilon(1e-3));
}
