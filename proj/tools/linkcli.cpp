// linkcli — scenario ingestion, command dispatch, report emission, and
// geometry export for the link-invariant engine.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "linkeng/link2.hpp"
#include "linkeng/link3.hpp"
#include "linkeng/scenario.hpp"
#include "linkeng/validate.hpp"

using json = nlohmann::ordered_json;
using namespace linkeng;

namespace {

constexpr const char* kSchema = "linkeng-report/1";
constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)v);
  return buf;
}

struct CommonOpts {
  std::string scenario = "hopf";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int resolution = 0;  // 0 = scenario / library default
  std::string report_path;
  std::string export_dir;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--scenario", o.scenario,
                  "built-in scenario name or scenario file path");
  cmd->add_option("--seed", o.seed, "random seed override")
      ->each([&o](const std::string&) { o.seed_set = true; });
  cmd->add_option("--resolution", o.resolution,
                  "solver grid resolution override");
  cmd->add_option("--report", o.report_path, "write the JSON report here");
  cmd->add_option("--export-dir", o.export_dir,
                  "directory for OBJ/CSV geometry exports");
}

Scenario load_scenario(const CommonOpts& o) {
  Scenario sc;
  if (is_builtin_scenario(o.scenario)) {
    sc = builtin_scenario(o.scenario);
  } else {
    std::ifstream in(o.scenario);
    if (!in)
      throw ValidationError("cannot open scenario file '" + o.scenario + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    sc = parse_scenario(buf.str());
  }
  if (o.seed_set) sc.cfg.seed = o.seed;
  if (o.resolution > 0) {
    sc.cfg.resolution = o.resolution;
    sc.cfg.per_factor.clear();
  }
  return sc;
}

json base_report(const std::string& command, const Scenario& sc,
                 const CommonOpts& o) {
  json r;
  r["schema"] = kSchema;
  r["tool_version"] = kVersion;
  r["command"] = command;
  r["scenario"] = o.scenario;
  r["scenario_digest"] = hex64(fnv1a64(sc.text));
  r["seed"] = sc.cfg.seed;
  r["results"] = json::object();
  r["diagnostics"] = json::array();
  r["notes"] = json::array();
  return r;
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json point_json(const TransversePoint& p) {
  json j;
  j["coords"] = vec_json(p.u);
  j["sign"] = p.sign;
  j["residual"] = p.residual;
  j["boundary_flag"] = p.boundary_flag;
  return j;
}

void finalize(json& rep, const CommonOpts& o,
              std::chrono::steady_clock::time_point t0) {
  rep["wall_time_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (!o.report_path.empty()) {
    std::ofstream out(o.report_path);
    if (!out)
      throw ValidationError("cannot write report '" + o.report_path + "'");
    out << rep.dump(2) << "\n";
  }
}

std::filesystem::path export_path(const CommonOpts& o,
                                  const std::string& file) {
  std::filesystem::create_directories(o.export_dir);
  return std::filesystem::path(o.export_dir) / file;
}

// parameter-space polyline: one comma-separated point per row
void write_polyline_csv(const std::filesystem::path& path,
                        const std::vector<Vec>& pts) {
  std::ofstream out(path);
  out.precision(17);
  for (const auto& p : pts) {
    for (int i = 0; i < p.size(); ++i)
      out << (i ? "," : "") << p[i];
    out << "\n";
  }
}

void write_points_csv(const std::filesystem::path& path,
                      const std::vector<TransversePoint>& pts) {
  std::ofstream out(path);
  out.precision(17);
  for (const auto& p : pts) {
    for (int i = 0; i < p.u.size(); ++i) out << p.u[i] << ",";
    out << p.sign << "\n";
  }
}

// ruled surface as an OBJ quad mesh: one object per traced circle
void write_disk_obj(const std::filesystem::path& path,
                    const WhitneyData& disk) {
  std::ofstream out(path);
  out.precision(17);
  int base = 1;
  for (std::size_t c = 0; c < disk.rulings.size(); ++c) {
    out << "o whitney_disk_" << c << "\n";
    const auto& rows = disk.rulings[c];
    const int ns = rows.empty() ? 0 : (int)rows[0].size();
    for (const auto& row : rows)
      for (const auto& v : row)
        out << "v " << v[0] << " " << v[1] << " " << v[2] << "\n";
    for (std::size_t k = 0; k + 1 < rows.size(); ++k)
      for (int s = 0; s + 1 < ns; ++s) {
        const int a = base + (int)k * ns + s;
        const int b = a + ns;
        out << "f " << a << " " << a + 1 << " " << b + 1 << " " << b << "\n";
      }
    base += (int)rows.size() * ns;
  }
}

// ---------------------------------------------------------------- commands

int cmd_lk(const CommonOpts& o, const std::string& pair_name,
           const std::string& method) {
  auto t0 = std::chrono::steady_clock::now();
  Scenario sc = load_scenario(o);
  LinkPair pair = sc.link_pair(pair_name);
  pair.validate_for_lk();
  json rep = base_report("lk", sc, o);
  rep["results"]["pair"] = pair_name;
  rep["results"]["method"] = method;

  bool have_int = false;
  int lk = 0;
  if (method == "ray" || method == "all") {
    lk = lk_via_ray(pair, Vec(), sc.cfg, sc.cfg.seed);
    rep["results"]["ray"] = lk;
    have_int = true;
  }
  if (method == "regular" || method == "all") {
    const int rv = lk_via_regular_value(pair, Vec(), sc.cfg, sc.cfg.seed);
    rep["results"]["regular_value"] = rv;
    if (have_int && rv != lk) {
      rep["diagnostics"].push_back("ray " + std::to_string(lk) +
                                   " != regular value " + std::to_string(rv));
      finalize(rep, o, t0);
      std::cout << rep["diagnostics"].back().get<std::string>() << "\n";
      throw MethodDisagreement("ray and regular-value methods disagree");
    }
    lk = rv;
    have_int = true;
  }
  if (method == "gauss" || method == "all") {
    const double g = lk_via_gauss_quadrature(pair, 256);
    rep["results"]["gauss_quadrature"] = g;
    const int gi = (int)std::lround(g);
    if (have_int && (gi != lk || std::abs(g - lk) > 1e-2)) {
      rep["diagnostics"].push_back("quadrature " + std::to_string(g) +
                                   " vs integer " + std::to_string(lk));
      finalize(rep, o, t0);
      std::cout << rep["diagnostics"].back().get<std::string>() << "\n";
      throw MethodDisagreement("quadrature disagrees with integer methods");
    }
    if (!have_int) lk = gi;
  }
  rep["results"]["lk"] = lk;
  finalize(rep, o, t0);
  std::cout << "lk(" << pair_name << ") = " << lk << "  [method " << method
            << ", all agree]\n";
  return 0;
}

int cmd_double_points(const CommonOpts& o, const std::string& pair_name) {
  auto t0 = std::chrono::steady_clock::now();
  Scenario sc = load_scenario(o);
  LinkPair pair = sc.link_pair(pair_name);
  auto res = double_points(pair, sc.cfg);
  json rep = base_report("double-points", sc, o);
  auto& out = rep["results"];
  out["pair"] = pair_name;
  out["dimension"] = res.dimension;
  out["integer_coeffs"] = res.integer_coeffs;
  if (res.dimension == 0) {
    out["count"] = res.points.size();
    out["signed_count"] = res.signed_count();
    out["mod2_count"] = res.mod2_count();
    out["points"] = json::array();
    for (const auto& p : res.points) out["points"].push_back(point_json(p));
    if (!o.export_dir.empty())
      write_points_csv(export_path(o, "double_points.csv"), res.points);
  } else {
    out["curve_count"] = res.curves.size();
    json curves = json::array();
    for (std::size_t i = 0; i < res.curves.size(); ++i) {
      const auto& c = res.curves[i];
      curves.push_back({{"closed", c.closed},
                        {"samples", c.points.size()},
                        {"arc_length", c.arc_length}});
      if (!o.export_dir.empty())
        write_polyline_csv(
            export_path(o, "double_curve_" + std::to_string(i) + ".csv"),
            c.points);
    }
    out["curves"] = curves;
  }
  finalize(rep, o, t0);
  std::cout << "double points: dimension " << res.dimension << ", "
            << (res.dimension == 0 ? res.points.size() : res.curves.size())
            << (res.dimension == 0 ? " points" : " curves") << "\n";
  return 0;
}

int cmd_whitney(const CommonOpts& o, std::string map_name,
                const std::string& lift_name, const std::string& pair_label) {
  auto t0 = std::chrono::steady_clock::now();
  Scenario sc = load_scenario(o);
  if (map_name.empty()) {
    const auto& l = sc.lift_decl(lift_name);
    int idx = pair_label == "12" ? 0 : pair_label == "23" ? 1 : 2;
    if (pair_label != "12" && pair_label != "23" && pair_label != "31")
      throw ValidationError("--pair must be one of 12, 23, 31");
    map_name = l.H[idx];
  }
  const ParamMap& H = sc.map(map_name);
  auto circles = whitney_circle(H, sc.cfg);
  auto disk = whitney_disk(H, circles);

  json rep = base_report("whitney", sc, o);
  auto& out = rep["results"];
  out["map"] = map_name;
  out["circle_count"] = circles.size();
  json curves = json::array();
  for (const auto& c : circles) {
    json j = {{"closed", c.closed},
              {"samples", c.points.size()},
              {"arc_length", c.arc_length}};
    if (!c.points.empty()) {
      j["start"] = vec_json(c.points.front());
      j["end"] = vec_json(c.points.back());
    }
    curves.push_back(j);
  }
  out["circles"] = curves;

  if (!o.export_dir.empty() && !circles.empty()) {
    write_disk_obj(export_path(o, "whitney_disk.obj"), disk);
    for (std::size_t i = 0; i < circles.size(); ++i) {
      write_polyline_csv(
          export_path(o, "whitney_circle_" + std::to_string(i) + ".csv"),
          circles[i].points);
      write_polyline_csv(
          export_path(o, "boundary_a_" + std::to_string(i) + ".csv"),
          disk.boundary_a[i]);
      write_polyline_csv(
          export_path(o, "boundary_b_" + std::to_string(i) + ".csv"),
          disk.boundary_b[i]);
    }
    out["exports"] = {"whitney_disk.obj", "whitney_circle_*.csv",
                      "boundary_*.csv"};
  }
  finalize(rep, o, t0);
  std::cout << "whitney circles of " << map_name << ": " << circles.size()
            << (circles.empty() ? " (no mesh written)" : "") << "\n";
  return 0;
}

json piece_json(const ObstructionPiece& p) {
  json j;
  j["tag"] = p.tag;
  j["domain"] = p.domain_desc;
  j["count"] = p.points.size();
  j["points"] = json::array();
  for (const auto& pt : p.points) j["points"].push_back(point_json(pt));
  return j;
}

int cmd_obstruct(const CommonOpts& o, const std::string& lift_name) {
  auto t0 = std::chrono::steady_clock::now();
  Scenario sc = load_scenario(o);
  T2Path path = sc.t2path(lift_name);
  auto rep3 = assemble_obstruction(path, sc.cfg);
  json rep = base_report("obstruct", sc, o);
  auto& out = rep["results"];
  out["lift"] = lift_name;
  out["pieces"] = json::array();
  for (const auto& p : rep3.pieces) out["pieces"].push_back(piece_json(p));
  out["integer_coeffs"] = rep3.integer_coeffs;
  out["mod2_total"] = rep3.mod2_total;
  if (rep3.integer_coeffs) out["signed_total"] = rep3.signed_total;
  for (const auto& n : rep3.notes) rep["notes"].push_back(n);
  finalize(rep, o, t0);
  std::cout << "obstruction: " << rep3.mod2_total << " mod 2";
  if (rep3.integer_coeffs) std::cout << " (signed " << rep3.signed_total << ")";
  std::cout << "\n";
  for (const auto& p : rep3.pieces)
    if (!p.points.empty())
      std::cout << "  " << p.tag << ": " << p.points.size() << " point(s)\n";
  return 0;
}

int cmd_demo(const CommonOpts& o) {
  auto t0 = std::chrono::steady_clock::now();
  CommonOpts bo = o;
  bo.scenario = "borromean";
  Scenario sc = load_scenario(bo);
  auto demo = borromean_demo(sc.cfg);

  json rep = base_report("demo", sc, bo);
  auto& out = rep["results"];
  out["double_points"] = json::array();
  for (const auto& p : demo.double_points)
    out["double_points"].push_back(point_json(p));  // coords (y, z, tau)
  out["arc_z_range"] = {demo.z_min, demo.z_max};
  out["arc_time_range"] = {demo.tau_min, demo.tau_max};
  out["det_max_err"] = demo.det_max_err;
  out["disk_intersection"] = piece_json(demo.disk_intersection);
  out["mod2_total"] = demo.report.mod2_total;
  out["signed_total"] = demo.report.signed_total;
  out["invariant_mod2"] = demo.invariant_mod2;
  for (const auto& n : demo.notes) rep["notes"].push_back(n);

  if (!o.export_dir.empty()) {
    write_disk_obj(export_path(o, "borromean_disk.obj"), demo.disk);
    write_points_csv(export_path(o, "double_points.csv"), demo.double_points);
    for (std::size_t i = 0; i < demo.whitney.size(); ++i)
      write_polyline_csv(
          export_path(o, "whitney_circle_" + std::to_string(i) + ".csv"),
          demo.whitney[i].points);
  }
  finalize(rep, o, t0);

  std::cout << "borromean demo\n";
  std::cout << "  double points of the component-3 / homotopy-1 system "
               "(y, z, time):\n";
  for (const auto& p : demo.double_points)
    std::cout << "    (" << p.u[0] << ", " << p.u[1] << ", " << p.u[2]
              << ")  sign " << (p.sign > 0 ? "+1" : "-1") << "\n";
  std::cout << "  arc z-range [" << demo.z_min << ", " << demo.z_max
            << "], time range [" << demo.tau_min << ", " << demo.tau_max
            << "]\n";
  std::cout << "  determinant check max error " << demo.det_max_err << "\n";
  std::cout << "  disk intersection points: "
            << demo.disk_intersection.points.size() << "\n";
  std::cout << "  triple-linking invariant: " << demo.invariant_mod2
            << " mod 2 (signed " << demo.report.signed_total << ")\n";
  for (const auto& n : demo.notes) std::cout << "  note: " << n << "\n";
  return 0;
}

int cmd_validate(const CommonOpts& o) {
  auto t0 = std::chrono::steady_clock::now();
  Scenario sc;  // validate is scenario-independent
  json rep = base_report("validate", sc, o);
  auto checks = run_all_checks();
  bool all = true;
  json arr = json::array();
  for (const auto& c : checks) {
    all &= c.pass;
    arr.push_back({{"name", c.name},
                   {"pass", c.pass},
                   {"detail", c.detail},
                   {"seconds", c.seconds}});
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": "
              << c.detail << "\n";
  }
  rep["results"]["checks"] = arr;
  rep["results"]["all_pass"] = all;
  finalize(rep, o, t0);
  if (!all) throw Error("validation suite failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical link-invariant engine"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string pair_name = "main", method = "all", lift_name = "main";
  std::string map_name, pair_label = "23", demo_name;

  auto* lk = app.add_subcommand("lk", "linking number of a declared pair");
  add_common(lk, o);
  lk->add_option("--pair", pair_name, "pair name (default: main)");
  lk->add_option("--method", method, "all | ray | regular | gauss")
      ->check(CLI::IsMember({"all", "ray", "regular", "gauss"}));

  auto* dp = app.add_subcommand("double-points",
                                "zero set of f1 - f2 for a declared pair");
  add_common(dp, o);
  dp->add_option("--pair", pair_name, "pair name (default: main)");

  auto* wh = app.add_subcommand("whitney",
                                "whitney circles and ruled disk of a "
                                "pair homotopy");
  add_common(wh, o);
  wh->add_option("--map", map_name, "homotopy map name (into R^6)");
  wh->add_option("--lift", lift_name, "lift whose homotopy to use");
  wh->add_option("--pair", pair_label, "pair within the lift: 12 | 23 | 31");

  auto* ob = app.add_subcommand("obstruct",
                                "triple-linking obstruction of a lift");
  add_common(ob, o);
  ob->add_option("--lift", lift_name, "lift name (default: main)");

  auto* de = app.add_subcommand("demo", "guided computations");
  add_common(de, o);
  de->add_option("name", demo_name, "demo name (borromean)")->required();

  auto* va = app.add_subcommand("validate", "run the full invariant suite");
  add_common(va, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  try {
    if (lk->parsed()) return cmd_lk(o, pair_name, method);
    if (dp->parsed()) return cmd_double_points(o, pair_name);
    if (wh->parsed()) return cmd_whitney(o, map_name, lift_name, pair_label);
    if (ob->parsed()) return cmd_obstruct(o, lift_name);
    if (de->parsed()) {
      if (demo_name != "borromean")
        throw UnknownIdentifier("unknown demo '" + demo_name + "'");
      return cmd_demo(o);
    }
    if (va->parsed()) return cmd_validate(o);
  } catch (const NonTransverse& e) {
    std::cerr << "error (non-transverse): " << e.what() << "\n";
    return 2;
  } catch (const BoundaryProximity& e) {
    std::cerr << "error (boundary proximity): " << e.what() << "\n";
    return 2;
  } catch (const MethodDisagreement& e) {
    std::cerr << "error (method disagreement): " << e.what() << "\n";
    return 4;
  } catch (const SyntaxError& e) {
    std::cerr << "error (syntax): " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error (validation): " << e.what() << "\n";
    return 3;
  } catch (const UnknownIdentifier& e) {
    std::cerr << "error (unknown identifier): " << e.what() << "\n";
    return 3;
  } catch (const PeriodicityViolation& e) {
    std::cerr << "error (periodicity): " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "error (domain): " << e.what() << "\n";
    return 3;
  } catch (const EndpointNotLink& e) {
    std::cerr << "error (endpoint not a link): " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 5;
  }
  return 0;
}
