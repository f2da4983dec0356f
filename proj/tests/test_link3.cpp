#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linkeng/link3.hpp"

using namespace linkeng;

namespace {

const double kS = (4.0 - std::sqrt(3.0)) / 6.0;  // interior s of the X point
const double kU = 0.25;                          // family time of the X point

bool near_pt(const std::vector<DomainFactor>& dom, const Vec& a,
             const Vec& b, double tol = 1e-6) {
  return domain_distance(dom, a, b) < tol;
}

}  // namespace

TEST_CASE("borromean family and its perturbation validate") {
  CHECK_NOTHROW(borromean_path().validate());
  CHECK_NOTHROW(borromean_perturbed_path().validate());
}

TEST_CASE("validation catches broken pair homotopies") {
  // p1 at t = 0 does not match component 2
  T2Path bad = borromean_path();
  bad.H[1] = parse_map(
      "H23(y: circle, z: circle, t: interval 0 1, u: interval 0 1) -> 6 = "
      "(2*cos y, 4*u, 2*sin y + t*(4 - (4*u - 2)^2), 2*cos z, sin z, 0)");
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  // not constant in t at the family endpoint u = 1
  T2Path drift = borromean_path();
  drift.H[0] = parse_map(
      "H12(x: circle, y: circle, t: interval 0 1, u: interval 0 1) -> 6 = "
      "(0, 2*cos x, sin x, cos y, 4*u + 4*t, 2*sin y)");
  CHECK_THROWS_AS(drift.validate(), ValidationError);

  // wrong shape
  T2Path shape = borromean_path();
  shape.H[2] = parse_map(
      "H31(z: circle, x: circle, t: interval 0 1) -> 6 = "
      "(2*cos z, sin z, 0, 0, 2*cos x, sin x)");
  CHECK_THROWS_AS(shape.validate(), ValidationError);
}

TEST_CASE("whitney circle of the bridging pair is a single open arc") {
  T2Path path = borromean_path();
  SolverConfig cfg;
  auto curves = whitney_circle(path.H[1], cfg);
  REQUIRE(curves.size() == 1);
  const auto& c = curves[0];
  CHECK(!c.closed);
  REQUIRE(c.start_tag.has_value());
  REQUIRE(c.end_tag.has_value());
  // both ends land on the stratum t = 0 (factor index 2, lower end)
  CHECK(c.start_tag->factor == 2);
  CHECK(c.start_tag->end == 0);
  CHECK(c.end_tag->factor == 2);
  CHECK(c.end_tag->end == 0);
  CHECK(c.arc_length == doctest::Approx(3.672555).epsilon(1e-3));

  const auto& dom = path.H[1].domain;
  Vec e1(4), e2(4);
  e1 << kPi, 2.0 * kPi / 3.0, 0.0, std::sqrt(3.0) / 8.0;
  e2 << 0.0, kPi / 3.0, 0.0, std::sqrt(3.0) / 8.0;
  const Vec& a = c.points.front();
  const Vec& b = c.points.back();
  CHECK(((near_pt(dom, a, e1, 1e-5) && near_pt(dom, b, e2, 1e-5)) ||
         (near_pt(dom, a, e2, 1e-5) && near_pt(dom, b, e1, 1e-5))));
}

TEST_CASE("whitney circles of the static pairs are empty") {
  T2Path path = borromean_path();
  SolverConfig cfg;
  CHECK(whitney_circle(path.H[0], cfg).empty());
  CHECK(whitney_circle(path.H[2], cfg).empty());
}

TEST_CASE("whitney disk rulings bridge the two component sides") {
  T2Path path = borromean_path();
  SolverConfig cfg;
  auto curves = whitney_circle(path.H[1], cfg);
  auto disk = whitney_disk(path.H[1], curves, 8);
  REQUIRE(disk.rulings.size() == 1);
  REQUIRE(disk.rulings[0].size() == curves[0].points.size());
  for (std::size_t k = 0; k < curves[0].points.size(); ++k) {
    const Vec& q = curves[0].points[k];
    const auto& gamma = disk.rulings[0][k];
    REQUIRE(gamma.size() == 17);
    // sigma = 0: the moving component 2 at family time u
    Vec side_a(3);
    side_a << std::cos(q[0]), 4.0 * q[3], 2.0 * std::sin(q[0]);
    CHECK((gamma.front() - side_a).norm() < 1e-9);
    // sigma = 1: component 3
    Vec side_b(3);
    side_b << 2.0 * std::cos(q[1]), std::sin(q[1]), 0.0;
    CHECK((gamma.back() - side_b).norm() < 1e-9);
    // sigma = 1/2: the double point itself, where both halves meet
    Vec h = MapFn(path.H[1]).eval(q);
    CHECK((h.head(3) - h.tail(3)).norm() < 1e-6);
    CHECK((gamma[8] - h.head(3)).norm() < 1e-9);
    CHECK((disk.boundary_a[0][k] - side_a).norm() < 1e-9);
    CHECK((disk.boundary_b[0][k] - side_b).norm() < 1e-9);
  }
}

TEST_CASE("full obstruction: one interior point, odd mod-2 class") {
  T2Path path = borromean_path();
  SolverConfig cfg;
  auto rep = assemble_obstruction(path, cfg);
  REQUIRE(rep.pieces.size() == 9);
  CHECK(rep.pieces[0].tag == "X1,(12)3");
  CHECK(rep.pieces[1].tag == "X1,(23)1");
  CHECK(rep.pieces[2].tag == "X1,(31)2");
  CHECK(rep.pieces[3].tag == "X2,(12)3");
  CHECK(rep.pieces[4].tag == "X2,(23)1");
  CHECK(rep.pieces[5].tag == "X2,(31)2");
  CHECK(rep.pieces[6].tag == "W(123)");
  CHECK(rep.pieces[7].tag == "W(231)");
  CHECK(rep.pieces[8].tag == "W(312)");
  for (std::size_t i = 0; i < rep.pieces.size(); ++i)
    CHECK(rep.pieces[i].points.size() == (i == 1 ? 1u : 0u));
  CHECK(rep.mod2_total == 1);
  CHECK(rep.signed_total == -1);
  CHECK(rep.integer_coeffs);

  const auto& pt = rep.pieces[1].points[0];
  CHECK(std::abs(pt.u[0] - 1.5 * kPi) < 1e-6);        // x2
  CHECK(std::abs(pt.u[1] - 0.5 * kPi) < 1e-6);        // x3
  CHECK(std::abs(pt.u[2] - 5.0 * kPi / 3.0) < 1e-6);  // x1
  CHECK(std::abs(pt.u[3] - kS) < 1e-6);               // s
  CHECK(std::abs(pt.u[4] - 2.0 / 3.0) < 1e-6);        // t
  CHECK(std::abs(pt.u[5] - kU) < 1e-6);               // u
  CHECK(pt.sign == -1);
  CHECK(!pt.boundary_flag);
}

TEST_CASE("obstruction is stable under a small perturbation") {
  T2Path path = borromean_perturbed_path();
  SolverConfig cfg;
  cfg.per_factor = {10, 10, 10, 8, 8, 8};
  auto rep = assemble_obstruction(path, cfg);
  CHECK(rep.mod2_total == 1);
  CHECK(rep.signed_total == -1);
  int nonempty = 0;
  for (const auto& p : rep.pieces) nonempty += !p.points.empty();
  CHECK(nonempty == 1);
}

TEST_CASE("unoriented components downgrade to mod-2 coefficients") {
  T2Path path = borromean_path();
  path.oriented[1] = false;
  SolverConfig cfg;
  cfg.per_factor = {10, 10, 10, 8, 8, 8};
  auto rep = assemble_obstruction(path, cfg);
  CHECK(!rep.integer_coeffs);
  CHECK(rep.mod2_total == 1);
  CHECK(!rep.notes.empty());
}
