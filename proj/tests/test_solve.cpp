#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linkeng/expr.hpp"
#include "linkeng/mapfn.hpp"
#include "linkeng/solve.hpp"

using namespace linkeng;

namespace {

DomainFactor circle_factor(const std::string& name) {
  DomainFactor f;
  f.kind = DomainFactor::Kind::Circle;
  f.name = name;
  return f;
}

DomainFactor interval_factor(const std::string& name, double lo, double hi) {
  DomainFactor f;
  f.kind = DomainFactor::Kind::Interval;
  f.name = name;
  f.lo = lo;
  f.hi = hi;
  return f;
}

}  // namespace

TEST_CASE("isolated zeros of (sin x, sin y) on the torus") {
  MapFn F({circle_factor("x"), circle_factor("y")}, 2,
          []<typename T>(std::span<const T> u, std::span<T> out) {
            out[0] = linkeng::sin(u[0]);
            out[1] = linkeng::sin(u[1]);
          });
  auto pts = find_zeros_0d({F, SolverConfig{}});
  REQUIRE(pts.size() == 4);
  // canonical order: (0,0), (0,pi), (pi,0), (pi,pi)
  CHECK(std::abs(pts[0].u[0]) < 1e-9);
  CHECK(pts[1].u[1] == doctest::Approx(kPi));
  CHECK(pts[3].u[0] == doctest::Approx(kPi));
  CHECK(pts[0].sign == 1);
  CHECK(pts[1].sign == -1);
  CHECK(pts[2].sign == -1);
  CHECK(pts[3].sign == 1);
  for (const auto& p : pts) {
    CHECK(p.residual <= 1e-10);
    CHECK(p.sigma_min > 0.9);
    CHECK_FALSE(p.boundary_flag);
  }
}

TEST_CASE("interval roots with signs") {
  MapFn F({interval_factor("t", -1, 1)}, 1,
          []<typename T>(std::span<const T> u, std::span<T> out) {
            out[0] = u[0] * u[0] - T(0.25);
          });
  auto pts = find_zeros_0d({F, SolverConfig{}});
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].u[0] == doctest::Approx(-0.5));
  CHECK(pts[1].u[0] == doctest::Approx(0.5));
  CHECK(pts[0].sign == -1);
  CHECK(pts[1].sign == 1);
}

TEST_CASE("two plane circles meet in two points of opposite sign") {
  auto f = MapFn(parse_map("f(x: circle) -> 2 = (cos x, sin x)"));
  auto g = MapFn(parse_map("g(y: circle) -> 2 = (1 + cos y, sin y)"));
  auto pts = find_zeros_0d({pair_difference(f, g), SolverConfig{}});
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].u[0] == doctest::Approx(kPi / 3));
  CHECK(pts[0].u[1] == doctest::Approx(2 * kPi / 3));
  CHECK(pts[1].u[0] == doctest::Approx(5 * kPi / 3));
  CHECK(pts[1].u[1] == doctest::Approx(4 * kPi / 3));
  CHECK(pts[0].sign + pts[1].sign == 0);
}

TEST_CASE("tangential intersection raises NonTransverse") {
  auto f = MapFn(parse_map("f(x: circle) -> 2 = (cos x, sin x)"));
  auto g = MapFn(parse_map("g(y: circle) -> 2 = (2 + cos y, sin y)"));
  CHECK_THROWS_AS(find_zeros_0d({pair_difference(f, g), SolverConfig{}}),
                  NonTransverse);
}

TEST_CASE("orientation sign respects the column permutation parity") {
  MapFn F({interval_factor("a", -1, 1), interval_factor("b", -1, 1)}, 2,
          []<typename T>(std::span<const T> u, std::span<T> out) {
            out[0] = u[0] - T(0.25);
            out[1] = u[1] + T(0.5);
          });
  auto pts = find_zeros_0d({F, SolverConfig{}});
  REQUIRE(pts.size() == 1);
  CHECK(orientation_sign(pts[0], {0, 1}) == 1);
  CHECK(orientation_sign(pts[0], {1, 0}) == -1);
}

TEST_CASE("newton polish converges from a nearby seed") {
  MapFn F({circle_factor("x")}, 1,
          []<typename T>(std::span<const T> u, std::span<T> out) {
            out[0] = linkeng::sin(u[0]);
          });
  Vec u0(1);
  u0 << 3.0;
  auto p = newton_polish(F, u0, SolverConfig{});
  REQUIRE(p.has_value());
  CHECK(p->u[0] == doctest::Approx(kPi));
}

TEST_CASE("unit circle traces as one closed curve of length 2*pi") {
  MapFn F({interval_factor("x1", -2, 2), interval_factor("x2", -2, 2)}, 1,
          []<typename T>(std::span<const T> u, std::span<T> out) {
            out[0] = u[0] * u[0] + u[1] * u[1] - T(1.0);
          });
  auto curves = trace_zeros_1d({F, SolverConfig{}});
  REQUIRE(curves.size() == 1);
  CHECK(curves[0].closed);
  CHECK(std::abs(curves[0].arc_length - kTwoPi) < 1e-3);
  for (const auto& q : curves[0].points)
    CHECK(std::abs(q[0] * q[0] + q[1] * q[1] - 1.0) < 1e-8);
}

TEST_CASE("open arc lands on interval boundary strata") {
  MapFn F({interval_factor("x1", -1, 1), interval_factor("x2", -1, 1)}, 1,
          []<typename T>(std::span<const T> u, std::span<T> out) {
            out[0] = u[1] - T(0.5) * u[0] * u[0];
          });
  auto curves = trace_zeros_1d({F, SolverConfig{}});
  REQUIRE(curves.size() == 1);
  const auto& c = curves[0];
  CHECK_FALSE(c.closed);
  REQUIRE(c.start_tag.has_value());
  REQUIRE(c.end_tag.has_value());
  CHECK(c.start_tag->factor == 0);
  CHECK(c.start_tag->end == 0);
  CHECK(c.end_tag->factor == 0);
  CHECK(c.end_tag->end == 1);
  CHECK(c.points.front()[0] == doctest::Approx(-1.0));
  CHECK(c.points.back()[0] == doctest::Approx(1.0));
  // length of the parabola x2 = x1^2/2 over [-1,1]
  const double L = std::sqrt(2.0) + std::asinh(1.0);
  CHECK(std::abs(c.arc_length - L) < 1e-3);
}

TEST_CASE("curve wrapping a circle factor closes up") {
  MapFn F({circle_factor("x"), interval_factor("t", 0, 4)}, 1,
          []<typename T>(std::span<const T> u, std::span<T> out) {
            out[0] = u[1] - T(2.0) - linkeng::sin(u[0]);
          });
  auto curves = trace_zeros_1d({F, SolverConfig{}});
  REQUIRE(curves.size() == 1);
  CHECK(curves[0].closed);
  // length of the graph t = 2 + sin x over one period
  CHECK(std::abs(curves[0].arc_length - 7.640395578) < 1e-3);
}

TEST_CASE("disjoint components are separated and sorted") {
  MapFn F({interval_factor("x1", -2, 2), interval_factor("x2", -2, 2)}, 1,
          []<typename T>(std::span<const T> u, std::span<T> out) {
            T a = u[0] * u[0] + u[1] * u[1] - T(0.25);
            T dx = u[0] - T(1.2);
            T b = dx * dx + u[1] * u[1] - T(0.25);
            out[0] = a * b;
          });
  auto curves = trace_zeros_1d({F, SolverConfig{}});
  REQUIRE(curves.size() == 2);
  CHECK(curves[0].closed);
  CHECK(curves[1].closed);
  CHECK(std::abs(curves[0].arc_length - kPi) < 2e-3);
  CHECK(std::abs(curves[1].arc_length - kPi) < 2e-3);
  CHECK(curves[0].points.front()[0] < curves[1].points.front()[0]);
}
