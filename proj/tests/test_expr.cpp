#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "linkeng/expr.hpp"
#include "linkeng/mapfn.hpp"

using namespace linkeng;

TEST_CASE("dual arithmetic propagates derivatives") {
  Dual x(0.7, 2, 0), y(1.3, 2, 1);
  Dual r = sin(x) * y + pow_int(x, 3) / y;
  const double v = std::sin(0.7) * 1.3 + std::pow(0.7, 3) / 1.3;
  CHECK(r.v == doctest::Approx(v).epsilon(1e-14));
  CHECK(r.d[0] ==
        doctest::Approx(std::cos(0.7) * 1.3 + 3 * 0.49 / 1.3).epsilon(1e-14));
  CHECK(r.d[1] ==
        doctest::Approx(std::sin(0.7) - std::pow(0.7, 3) / (1.3 * 1.3))
            .epsilon(1e-14));
}

TEST_CASE("circle map parses and evaluates") {
  auto m = parse_map("c(x: circle) -> 3 = (cos x, sin x, 0)");
  CHECK(m.name == "c");
  CHECK(m.dim_in() == 1);
  CHECK(m.dim_out == 3);
  Vec u(1);
  u << 0.0;
  Vec v = m.eval(u);
  CHECK(v[0] == doctest::Approx(1.0));
  CHECK(v[1] == doctest::Approx(0.0));
  CHECK(v[2] == 0.0);
  // wrapping: evaluation at x + 2*pi matches
  u << 1.0 + kTwoPi;
  Vec w = m.eval(u);
  u << 1.0;
  Vec w0 = m.eval(u);
  CHECK((w - w0).norm() < 1e-12);
}

TEST_CASE("interval map with powers") {
  auto m = parse_map("g(t: interval 0 2) -> 1 = (t^3 - 2*t + 1)");
  Vec u(1);
  u << 1.5;
  CHECK(m.eval(u)[0] == doctest::Approx(1.5 * 1.5 * 1.5 - 3.0 + 1.0));
  Mat J = m.jacobian(u);
  CHECK(J(0, 0) == doctest::Approx(3 * 1.5 * 1.5 - 2.0));
}

TEST_CASE("print-then-parse is the identity") {
  const char* defs[] = {
      "c(x: circle) -> 3 = (cos x, sin x, 0)",
      "h(y: circle, t: interval 0 4) -> 3 = (cos y, t, 2*sin y - (t - 2)^2 + "
      "4)",
      "q(a: circle, b: circle) -> 2 = ((2 + cos a)*cos b, exp(sin a)/2)",
      "w(s: interval -1 1) -> 1 = (sqrt(s^2 + 1) - pi*s)",
  };
  for (const char* d : defs) {
    auto m1 = parse_map(d);
    std::string p1 = m1.print();
    auto m2 = parse_map(p1);
    CHECK(m2.print() == p1);
    // same values too
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> un(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      Vec u(m1.dim_in());
      for (int j = 0; j < m1.dim_in(); ++j) {
        const auto& f = m1.domain[j];
        u[j] = f.lower() + un(rng) * f.width();
      }
      CHECK((m1.eval(u) - m2.eval(u)).norm() < 1e-12);
    }
  }
}

TEST_CASE("constant folding happens at parse time") {
  auto m = parse_map("k(x: circle) -> 1 = (sin(x) * (2*3 - 5) + (1 - 1))");
  // the folded expression should print without any leftover arithmetic
  auto plain = parse_map("k(x: circle) -> 1 = (sin(x))");
  CHECK(m.print() == plain.print());
  Vec u(1);
  u << 0.3;
  CHECK(m.eval(u)[0] == doctest::Approx(std::sin(0.3)));
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse_map("c(x: circle) -> 3 = (cos x, sin x"), SyntaxError);
  CHECK_THROWS_AS(parse_map("c(x: circle) -> 1 = (cos y)"), UnknownIdentifier);
  CHECK_THROWS_AS(parse_map("c(x: squiggle) -> 1 = (x)"), SyntaxError);
  CHECK_THROWS_AS(parse_map("c(t: interval 1 0) -> 1 = (t)"), ValidationError);
  CHECK_THROWS_AS(parse_map("c(x: circle, x: circle) -> 1 = (sin x)"),
                  ValidationError);
  try {
    parse_map("c(x: circle) -> 1 = (cos x @ 2)");
    CHECK(false);
  } catch (const SyntaxError& e) {
    CHECK(e.offset > 0);
  }
}

TEST_CASE("non-periodic circle component is rejected") {
  CHECK_THROWS_AS(parse_map("c(x: circle) -> 1 = (x)"), PeriodicityViolation);
  CHECK_THROWS_AS(parse_map("c(x: circle) -> 2 = (cos x, x*sin x)"),
                  PeriodicityViolation);
  // interval coordinates are free of the constraint
  CHECK_NOTHROW(parse_map("c(t: interval 0 1) -> 1 = (t)"));
  // periodic through composition is fine
  CHECK_NOTHROW(parse_map("c(x: circle) -> 1 = (sin(2*x) + cos(x)^2)"));
}

TEST_CASE("domain errors at evaluation") {
  auto m = parse_map("d(t: interval -2 2) -> 1 = (sqrt(t))");
  Vec u(1);
  u << -1.0;
  CHECK_THROWS_AS(m.eval(u), DomainError);
  auto m2 = parse_map("e(t: interval -2 2) -> 1 = (1/t)");
  u << 0.0;
  CHECK_THROWS_AS(m2.eval(u), DomainError);
}

TEST_CASE("jacobian matches finite differences on random points") {
  auto m = parse_map(
      "f(x: circle, y: circle, t: interval 0 4) -> 3 = "
      "(cos y + exp(sin x)/4, t*sin y, 2*sin y - (t - 2)^2 + 4)");
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> un(0.05, 0.95);
  for (int trial = 0; trial < 20; ++trial) {
    Vec u(3);
    for (int j = 0; j < 3; ++j) {
      const auto& f = m.domain[j];
      u[j] = f.lower() + un(rng) * f.width();
    }
    Mat J = m.jacobian(u);
    const double h = 1e-6;
    for (int j = 0; j < 3; ++j) {
      Vec up = u, um = u;
      up[j] += h;
      um[j] -= h;
      Vec fd = (m.eval(up) - m.eval(um)) / (2 * h);
      for (int i = 0; i < 3; ++i)
        CHECK(J(i, j) == doctest::Approx(fd[i]).epsilon(1e-6));
    }
  }
}

TEST_CASE("domain distance is periodic") {
  std::vector<DomainFactor> dom(2);
  dom[0].kind = DomainFactor::Kind::Circle;
  dom[1].kind = DomainFactor::Kind::Interval;
  dom[1].lo = 0;
  dom[1].hi = 1;
  Vec a(2), b(2);
  a << 0.05, 0.5;
  b << kTwoPi - 0.05, 0.5;
  CHECK(domain_distance(dom, a, b) == doctest::Approx(0.1));
}

TEST_CASE("mapfn combinators") {
  auto f = MapFn(parse_map("f(x: circle) -> 2 = (cos x, sin x)"));
  auto g = MapFn(parse_map("g(y: circle) -> 2 = (2*cos y, 2*sin y)"));
  auto d = pair_difference(f, g);
  CHECK(d.dim_in() == 2);
  CHECK(d.dim_out() == 2);
  Vec u(2);
  u << 0.3, 1.1;
  Vec v = d.eval(u);
  CHECK(v[0] == doctest::Approx(std::cos(0.3) - 2 * std::cos(1.1)));
  CHECK(v[1] == doctest::Approx(std::sin(0.3) - 2 * std::sin(1.1)));
  Mat J = d.jacobian(u);
  CHECK(J(0, 0) == doctest::Approx(-std::sin(0.3)));
  CHECK(J(0, 1) == doctest::Approx(2 * std::sin(1.1)));

  auto h = MapFn(
      parse_map("h(x: circle, t: interval 0 1) -> 2 = (cos x, t*sin x)"));
  auto h0 = fix_coord(h, 1, 0.5);
  CHECK(h0.dim_in() == 1);
  Vec w(1);
  w << 0.7;
  CHECK(h0.eval(w)[1] == doctest::Approx(0.5 * std::sin(0.7)));

  auto hp = permute_inputs(h, {1, 0});
  Vec pu(2);
  pu << 0.5, 0.7;  // (t, x)
  CHECK(hp.eval(pu)[1] == doctest::Approx(0.5 * std::sin(0.7)));

  auto q = MapFn(parse_map(
      "q(x: circle) -> 4 = (cos x, sin x, 2*cos x, 2*sin x)"));
  auto gap = diagonal_gap(q);
  Vec xu(1);
  xu << 0.9;
  CHECK(gap.eval(xu)[0] == doctest::Approx(-std::cos(0.9)));
  auto sw = swap_halves(q);
  CHECK(sw.eval(xu)[0] == doctest::Approx(2 * std::cos(0.9)));
  CHECK(sw.eval(xu)[2] == doctest::Approx(std::cos(0.9)));
}
