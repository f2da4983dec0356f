#include "linkeng/validate.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "linkeng/link2.hpp"
#include "linkeng/link3.hpp"
#include "linkeng/scenario.hpp"

namespace linkeng {

namespace {

using Clock = std::chrono::steady_clock;

struct Tally {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << what;
    }
  }
};

CheckResult finish(const std::string& name, Tally& t,
                   Clock::time_point t0, const std::string& ok_detail) {
  CheckResult r;
  r.name = name;
  r.pass = t.pass;
  r.detail = t.pass ? ok_detail : t.detail.str();
  r.seconds =
      std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// ---- random expression generator (trig polynomials and safe nestings) ----

std::string rand_expr(std::mt19937_64& rng, const std::vector<std::string>& vars,
                      int depth) {
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_int_distribution<int> pick_var(0, (int)vars.size() - 1);
  if (depth == 0) {
    if (rng() % 3 == 0) return fmt("%.4f", coeff(rng));
    return vars[pick_var(rng)];
  }
  const std::string a = rand_expr(rng, vars, depth - 1);
  const std::string b = rand_expr(rng, vars, depth - 1);
  switch (rng() % 8) {
    case 0:
      return "(" + a + " + " + b + ")";
    case 1:
      return "(" + a + " - " + b + ")";
    case 2:
      return "(" + a + ") * (" + b + ")";
    case 3:
      return "sin(" + a + ")";
    case 4:
      return "cos(" + a + ")";
    case 5:
      return "(sin(" + a + "))^2";
    case 6:
      return "exp(0.2*cos(" + a + "))";
    default:
      return "sqrt(2 + sin(" + a + "))";
  }
}

// central finite-difference jacobian of a plain expression
double fd_partial(const Expression& e, Vec u, int j, double h) {
  u[j] += h;
  double hi = e.eval(std::span<const double>(u.data(), (size_t)u.size()));
  u[j] -= 2 * h;
  double lo = e.eval(std::span<const double>(u.data(), (size_t)u.size()));
  return (hi - lo) / (2 * h);
}

double ad_partial(const Expression& e, const Vec& u, int j) {
  const int k = (int)u.size();
  std::vector<Dual> in(k);
  for (int i = 0; i < k; ++i) in[i] = Dual(u[i], k, i);
  return e.eval(std::span<const Dual>(in)).d[j];
}

// trig-polynomial component over two circles, as DSL text
std::string trig_component(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c1(-1.0, 1.0);
  std::uniform_real_distribution<double> c0(-0.5, 0.5);
  std::ostringstream s;
  s << fmt("%.6f", c0(rng)) << " + " << fmt("%.6f", c1(rng)) << "*cos x + "
    << fmt("%.6f", c1(rng)) << "*sin x + " << fmt("%.6f", c1(rng))
    << "*cos y + " << fmt("%.6f", c1(rng)) << "*sin y + "
    << fmt("%.6f", c1(rng)) << "*cos x*sin y + " << fmt("%.6f", c1(rng))
    << "*sin x*cos y";
  return s.str();
}

// dense-grid brute-force count of transverse zeros of a 2-circle system
int brute_force_count(const MapFn& F, const SolverConfig& cfg, int grid) {
  std::vector<double> g0((grid + 1) * (grid + 1)), g1(g0.size());
  const double h = kTwoPi / grid;
  Vec u(2);
  for (int i = 0; i <= grid; ++i)
    for (int j = 0; j <= grid; ++j) {
      u << (i % grid) * h, (j % grid) * h;
      Vec v = F.eval(u);
      g0[i * (grid + 1) + j] = v[0];
      g1[i * (grid + 1) + j] = v[1];
    }
  auto sign_change = [&](const std::vector<double>& g, int i, int j) {
    const double a = g[i * (grid + 1) + j], b = g[i * (grid + 1) + j + 1];
    const double c = g[(i + 1) * (grid + 1) + j],
                 d = g[(i + 1) * (grid + 1) + j + 1];
    const double mn = std::min(std::min(a, b), std::min(c, d));
    const double mx = std::max(std::max(a, b), std::max(c, d));
    return mn <= 0.0 && mx >= 0.0;
  };
  std::vector<Vec> found;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      if (!sign_change(g0, i, j) || !sign_change(g1, i, j)) continue;
      u << (i + 0.5) * h, (j + 0.5) * h;
      auto pt = newton_polish(F, u, cfg);
      if (!pt) continue;
      bool dup = false;
      for (const auto& q : found)
        dup |= domain_distance(F.domain(), q, pt->u) < 1e-5;
      if (!dup) found.push_back(pt->u);
    }
  return (int)found.size();
}

}  // namespace

CheckResult check_borromean_reproduction() {
  auto t0 = Clock::now();
  Tally t;
  SolverConfig cfg;
  auto demo = borromean_demo(cfg);
  double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  t.expect(demo.double_points.size() == 2,
           "expected 2 double points, got " +
               std::to_string(demo.double_points.size()));
  t.expect(std::abs(demo.z_min - kPi / 3.0) < 1e-3 &&
               std::abs(demo.z_max - 2.0 * kPi / 3.0) < 1e-3,
           "arc z-range " + fmt("%.6f", demo.z_min) + ".." +
               fmt("%.6f", demo.z_max) + " != [pi/3, 2pi/3]");
  t.expect(std::abs(demo.tau_min - std::sqrt(3.0) / 2.0) < 1e-3 &&
               std::abs(demo.tau_max - 1.0) < 1e-3,
           "arc time range " + fmt("%.6f", demo.tau_min) + ".." +
               fmt("%.6f", demo.tau_max) + " != [sqrt(3)/2, 1]");
  t.expect(demo.det_max_err <= 1e-8,
           "determinant mismatch " + fmt("%.3e", demo.det_max_err));
  t.expect(demo.disk_intersection.points.size() == 1,
           "expected 1 disk intersection, got " +
               std::to_string(demo.disk_intersection.points.size()));
  t.expect(demo.invariant_mod2 == 1,
           "invariant mod 2 = " + std::to_string(demo.invariant_mod2));
  t.expect(dt <= 60.0, "demo took " + fmt("%.1f", dt) + " s (> 60)");
  return finish("borromean reproduction", t, t0,
                "2 double points, ranges and determinant match, 1 disk "
                "intersection, invariant 1 mod 2, " +
                    fmt("%.1f", dt) + " s");
}

CheckResult check_lk_three_way_agreement() {
  auto t0 = Clock::now();
  Tally t;
  SolverConfig cfg;
  struct Case {
    std::string scenario, pair;
    int abs_expected;
  };
  const Case cases[] = {
      {"hopf", "main", 1},      {"unlink2", "main", 0},
      {"torus-2-4", "main", 2}, {"torus-2-6", "main", 3},
      {"borromean", "p12", 0},  {"borromean", "p23", 0},
      {"borromean", "p31", 0},
  };
  std::ostringstream ok;
  for (const auto& c : cases) {
    LinkPair pair = builtin_scenario(c.scenario).link_pair(c.pair);
    const int ray = lk_via_ray(pair, Vec(), cfg, 7);
    const int rv = lk_via_regular_value(pair, Vec(), cfg, 7);
    const double g = lk_via_gauss_quadrature(pair, 256);
    const std::string label = c.scenario + "/" + c.pair;
    t.expect(ray == rv, label + ": ray " + std::to_string(ray) +
                            " != regular value " + std::to_string(rv));
    t.expect(std::abs(g - ray) <= 1e-2,
             label + ": quadrature " + fmt("%.5f", g) + " vs " +
                 std::to_string(ray));
    t.expect(std::abs(ray) == c.abs_expected,
             label + ": |lk| = " + std::to_string(std::abs(ray)) +
                 ", expected " + std::to_string(c.abs_expected));
    ok << label << "=" << ray << " ";
  }
  return finish("three-way lk agreement", t, t0, ok.str());
}

CheckResult check_lift_independence() {
  auto t0 = Clock::now();
  Tally t;
  SolverConfig cfg;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> amp(-0.05, 0.05);
  std::ostringstream ok;
  for (int i = 0; i < 5; ++i) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "f1(x: circle) -> 3 = (cos x + %.4f*sin(2*x), "
                  "sin x + %.4f*cos(2*x), %.4f*sin(3*x))",
                  amp(rng), amp(rng), amp(rng));
    LinkPair pair;
    pair.f1 = parse_map(buf);
    std::snprintf(buf, sizeof(buf),
                  "f2(y: circle) -> 3 = (1 + cos y + %.4f*cos(3*y), "
                  "%.4f*sin(2*y), sin y + %.4f*cos(2*y))",
                  amp(rng), amp(rng), amp(rng));
    pair.f2 = parse_map(buf);
    const int n1 =
        lk_via_homotopy(pair, cfg, 1000 + (std::uint64_t)i).signed_count();
    const int n2 =
        lk_via_homotopy(pair, cfg, 5000 + (std::uint64_t)i).signed_count();
    t.expect(n1 == n2, "link " + std::to_string(i) + ": lifts disagree, " +
                           std::to_string(n1) + " vs " + std::to_string(n2));
    ok << n1 << " ";
  }
  return finish("lift independence", t, t0,
                "5 perturbed links, both homotopies: " + ok.str());
}

CheckResult check_solver_brute_force() {
  auto t0 = Clock::now();
  Tally t;
  std::mt19937_64 rng(7);
  std::ostringstream ok;
  int done = 0, draws = 0;
  while (done < 10 && draws < 40) {
    ++draws;
    const std::string text = "g(x: circle, y: circle) -> 2 = (" +
                             trig_component(rng) + ", " +
                             trig_component(rng) + ")";
    ZeroProblem p;
    p.F = MapFn(parse_map(text));
    int solver_count = 0;
    try {
      solver_count = (int)find_zeros_0d(p).size();
    } catch (const NonTransverse&) {
      continue;  // redraw: system not generic at this tolerance
    } catch (const ResolutionUnstable&) {
      continue;
    }
    const int brute = brute_force_count(p.F, p.cfg, 512);
    t.expect(solver_count == brute,
             "system " + std::to_string(done) + ": solver " +
                 std::to_string(solver_count) + " != brute force " +
                 std::to_string(brute));
    ok << solver_count << " ";
    ++done;
  }
  t.expect(done == 10, "only " + std::to_string(done) +
                           " generic systems in 40 draws");
  return finish("solver vs dense grid", t, t0,
                "10 systems, matching counts: " + ok.str());
}

CheckResult check_ad_finite_differences() {
  auto t0 = Clock::now();
  Tally t;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, kTwoPi);
  const double h = 1e-5;
  double worst = 0;

  // 50 random expressions in 1..3 variables
  const std::vector<std::string> all_vars = {"x", "y", "z"};
  for (int e = 0; e < 50; ++e) {
    const int k = 1 + (int)(rng() % 3);
    std::vector<std::string> vars(all_vars.begin(), all_vars.begin() + k);
    Expression ex;
    try {
      ex = parse_expression(rand_expr(rng, vars, 3), vars);
    } catch (const DomainError&) {
      --e;  // constant folding hit a singular value; redraw
      continue;
    }
    for (int s = 0; s < 4; ++s) {
      Vec u(k);
      for (int i = 0; i < k; ++i) u[i] = unif(rng);
      for (int j = 0; j < k; ++j) {
        const double ad = ad_partial(ex, u, j);
        const double fd = fd_partial(ex, u, j, h);
        const double rel = std::abs(ad - fd) / std::max(1.0, std::abs(ad));
        worst = std::max(worst, rel);
        t.expect(rel <= 1e-6, "expression " + std::to_string(e) +
                                  " partial " + std::to_string(j) +
                                  ": rel err " + fmt("%.3e", rel));
      }
    }
  }

  // every map of every built-in scenario
  for (const auto& name : builtin_scenario_names()) {
    auto sc = builtin_scenario(name);
    for (const auto& [mname, m] : sc.maps) {
      MapFn f(m);
      for (int s = 0; s < 5; ++s) {
        Vec u(m.dim_in());
        for (int i = 0; i < m.dim_in(); ++i) {
          const auto& d = m.domain[i];
          std::uniform_real_distribution<double> in_d(d.lower() + 0.01,
                                                      d.upper() - 0.01);
          u[i] = in_d(rng);
        }
        Mat J = f.jacobian(u);
        for (int j = 0; j < m.dim_in(); ++j) {
          Vec up = u, dn = u;
          up[j] += h;
          dn[j] -= h;
          Vec fd = (f.eval(up) - f.eval(dn)) / (2 * h);
          for (int r = 0; r < m.dim_out; ++r) {
            const double rel = std::abs(J(r, j) - fd[r]) /
                               std::max(1.0, std::abs(J(r, j)));
            worst = std::max(worst, rel);
            t.expect(rel <= 1e-6, name + "/" + mname + ": rel err " +
                                      fmt("%.3e", rel));
          }
        }
      }
    }
  }
  return finish("automatic differentiation vs finite differences", t, t0,
                "worst relative error " + fmt("%.3e", worst));
}

CheckResult check_invariance_suite() {
  auto t0 = Clock::now();
  Tally t;
  SolverConfig cfg;

  LinkPair hopf = builtin_scenario("hopf").link_pair("main");
  const int base = lk_via_ray(hopf, Vec(), cfg, 7);

  LinkPair shifted = hopf;
  shifted.f2 =
      precompose_circle(hopf.f2, 0, parse_expression("y + 1.234", {"y"}));
  t.expect(lk_via_ray(shifted, Vec(), cfg, 7) == base,
           "reparametrization changed lk");

  LinkPair reversed = hopf;
  reversed.f2 =
      precompose_circle(hopf.f2, 0, parse_expression("0 - y", {"y"}));
  t.expect(lk_via_ray(reversed, Vec(), cfg, 7) == -base,
           "orientation reversal did not negate lk");

  // cyclic component relabeling of the borromean family
  {
    T2Path p = borromean_path(), q;
    for (int i = 0; i < 3; ++i) {
      q.f[i] = p.f[(i + 1) % 3];
      q.H[i] = p.H[(i + 1) % 3];
    }
    SolverConfig coarse;
    coarse.per_factor = {10, 10, 10, 8, 8, 8};
    auto rep = assemble_obstruction(q, coarse);
    t.expect(rep.mod2_total == 1,
             "relabeled family mod-2 invariant = " +
                 std::to_string(rep.mod2_total));
  }

  // doubling the solver resolution changes no reported integer
  for (const auto& name : {"hopf", "unlink2", "torus-2-4", "torus-2-6"}) {
    LinkPair pr = builtin_scenario(name).link_pair("main");
    SolverConfig lo = cfg, hi = cfg;
    lo.resolution = 64;
    hi.resolution = 128;
    const int a = lk_via_ray(pr, Vec(), lo, 7);
    const int b = lk_via_ray(pr, Vec(), hi, 7);
    t.expect(a == b, std::string(name) + ": lk " + std::to_string(a) +
                         " -> " + std::to_string(b) +
                         " under resolution doubling");
  }
  for (const auto& name : {"borromean", "unlink3"}) {
    T2Path path = builtin_scenario(name).t2path("main");
    SolverConfig lo, hi;
    lo.per_factor = {6, 6, 6, 4, 4, 4};
    hi.per_factor = {12, 12, 12, 8, 8, 8};
    auto ra = assemble_obstruction(path, lo);
    auto rb = assemble_obstruction(path, hi);
    t.expect(ra.signed_total == rb.signed_total &&
                 ra.mod2_total == rb.mod2_total,
             std::string(name) + ": obstruction changed under resolution "
                                 "doubling");
  }
  return finish("invariance suite", t, t0,
                "reparametrization, reversal, relabeling, resolution "
                "doubling all stable");
}

CheckResult check_degenerate_handling() {
  auto t0 = Clock::now();
  Tally t;
  SolverConfig cfg;

  T2Path unlink = builtin_scenario("unlink3").t2path("main");
  auto rep = assemble_obstruction(unlink, cfg);
  for (const auto& p : rep.pieces)
    t.expect(p.points.empty(), p.tag + " nonempty on the unlink");
  t.expect(rep.mod2_total == 0 && rep.signed_total == 0,
           "unlink invariant nonzero");

  LinkPair tangent = builtin_scenario("tangent-pair").link_pair("main");
  bool threw = false;
  try {
    lk_via_ray(tangent, Vec(), cfg, 7);
  } catch (const NonTransverse&) {
    threw = true;
  }
  t.expect(threw, "tangential pair produced a silent count");
  return finish("degenerate handling", t, t0,
                "unlink empty everywhere, tangential pair rejected");
}

std::vector<CheckResult> run_all_checks() {
  return {
      check_borromean_reproduction(), check_lk_three_way_agreement(),
      check_lift_independence(),      check_solver_brute_force(),
      check_ad_finite_differences(),  check_invariance_suite(),
      check_degenerate_handling(),
  };
}

}  // namespace linkeng
