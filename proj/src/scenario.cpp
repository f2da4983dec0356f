#include "linkeng/scenario.hpp"

#include <algorithm>
#include <sstream>

#include "linkeng/errors.hpp"

namespace linkeng {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw SyntaxError((std::size_t)line, "",
                    "scenario line " + std::to_string(line) + ": " + msg);
}

void apply_config(SolverConfig& cfg, const std::string& key,
                  const std::string& value, int line) {
  try {
    if (key == "resolution")
      cfg.resolution = std::stoi(value);
    else if (key == "newton_tol")
      cfg.newton_tol = std::stod(value);
    else if (key == "dedup_radius")
      cfg.dedup_radius = std::stod(value);
    else if (key == "sigma_min_rel")
      cfg.sigma_min_rel = std::stod(value);
    else if (key == "max_refine_depth")
      cfg.max_refine_depth = std::stoi(value);
    else if (key == "boundary_margin")
      cfg.boundary_margin = std::stod(value);
    else if (key == "prune_safety")
      cfg.prune_safety = std::stod(value);
    else if (key == "max_newton_iter")
      cfg.max_newton_iter = std::stoi(value);
    else
      fail(line, "unknown config key '" + key + "'");
  } catch (const std::invalid_argument&) {
    fail(line, "malformed config value '" + value + "'");
  } catch (const std::out_of_range&) {
    fail(line, "config value out of range '" + value + "'");
  }
}

}  // namespace

const ParamMap& Scenario::map(const std::string& name) const {
  auto it = maps.find(name);
  if (it == maps.end())
    throw UnknownIdentifier("no map named '" + name + "' in the scenario");
  return it->second;
}

const Scenario::PairDecl& Scenario::pair_decl(const std::string& name) const {
  for (const auto& p : pairs)
    if (p.name == name) return p;
  throw UnknownIdentifier("no pair named '" + name + "' in the scenario");
}

const Scenario::LiftDecl& Scenario::lift_decl(const std::string& name) const {
  for (const auto& l : lifts)
    if (l.name == name) return l;
  throw UnknownIdentifier("no lift named '" + name + "' in the scenario");
}

LinkPair Scenario::link_pair(const std::string& name) const {
  const PairDecl& d = pair_decl(name);
  LinkPair p;
  p.f1 = map(d.m1);
  p.f2 = map(d.m2);
  p.oriented1 = !unoriented.count(d.m1);
  p.oriented2 = !unoriented.count(d.m2);
  return p;
}

T2Path Scenario::t2path(const std::string& lift_name) const {
  const LiftDecl& l = lift_decl(lift_name);
  const TripleDecl* tr = nullptr;
  for (const auto& t : triples)
    if (t.name == l.triple) tr = &t;
  if (!tr)
    throw UnknownIdentifier("no triple named '" + l.triple +
                            "' in the scenario");
  T2Path path;
  for (int i = 0; i < 3; ++i) {
    path.f[i] = map(tr->comps[i]);
    path.H[i] = map(l.H[i]);
    path.oriented[i] = !unoriented.count(tr->comps[i]);
  }
  path.validate();
  return path;
}

Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  sc.text = text;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    const std::string& kw = tokens[0];
    if (kw == "map") {
      const auto pos = line.find("map");
      ParamMap m;
      try {
        m = parse_map(line.substr(pos + 3));
      } catch (const Error& e) {
        fail(lineno, e.what());
      }
      if (sc.maps.count(m.name))
        fail(lineno, "duplicate map name '" + m.name + "'");
      sc.maps.emplace(m.name, std::move(m));
    } else if (kw == "pair") {
      if (tokens.size() != 5 || tokens[2] != "=")
        fail(lineno, "expected: pair <name> = <m1> <m2>");
      sc.pairs.push_back({tokens[1], tokens[3], tokens[4]});
    } else if (kw == "triple") {
      if (tokens.size() != 6 || tokens[2] != "=")
        fail(lineno, "expected: triple <name> = <m1> <m2> <m3>");
      sc.triples.push_back({tokens[1], {tokens[3], tokens[4], tokens[5]}});
    } else if (kw == "lift") {
      if (tokens.size() != 8 || tokens[2] != "=" || tokens[4] != ":")
        fail(lineno,
             "expected: lift <name> = <triple> : <H12> <H23> <H31>");
      sc.lifts.push_back({tokens[1], tokens[3],
                          {tokens[5], tokens[6], tokens[7]}});
    } else if (kw == "unoriented") {
      if (tokens.size() != 2) fail(lineno, "expected: unoriented <map name>");
      sc.unoriented.insert(tokens[1]);
    } else if (kw == "config") {
      if (tokens.size() != 3) fail(lineno, "expected: config <key> <value>");
      apply_config(sc.cfg, tokens[1], tokens[2], lineno);
    } else if (kw == "seed") {
      if (tokens.size() != 2) fail(lineno, "expected: seed <u64>");
      try {
        sc.cfg.seed = std::stoull(tokens[1]);
      } catch (const std::exception&) {
        fail(lineno, "malformed seed '" + tokens[1] + "'");
      }
    } else {
      fail(lineno, "unknown declaration '" + kw + "'");
    }
  }

  // dimensional consistency of every declared role, before any solve
  for (const auto& p : sc.pairs) {
    const ParamMap& a = sc.map(p.m1);
    const ParamMap& b = sc.map(p.m2);
    if (a.dim_out != b.dim_out)
      throw ValidationError("pair '" + p.name +
                            "': components must share a target dimension");
  }
  for (const auto& t : sc.triples)
    for (const auto& c : t.comps)
      if (sc.map(c).dim_out != 3)
        throw ValidationError("triple '" + t.name +
                              "': components must map into R^3");
  for (const auto& l : sc.lifts) {
    bool found = false;
    for (const auto& t : sc.triples) found |= t.name == l.triple;
    if (!found)
      throw UnknownIdentifier("lift '" + l.name +
                              "' references unknown triple '" + l.triple +
                              "'");
    for (const auto& h : l.H)
      if (sc.map(h).dim_out != 6)
        throw ValidationError("lift '" + l.name +
                              "': pair homotopies must map into R^6");
  }
  return sc;
}

namespace {

struct Builtin {
  const char* name;
  const char* text;
};

constexpr const char* kHopf = R"(# two round circles linking once
map f1(x: circle) -> 3 = (cos x, sin x, 0)
map f2(y: circle) -> 3 = (1 + cos y, 0, sin y)
pair main = f1 f2
)";

constexpr const char* kUnlink2 = R"(# two distant round circles
map f1(x: circle) -> 3 = (cos x, sin x, 0)
map f2(y: circle) -> 3 = (4 + cos y, sin y, 0)
pair main = f1 f2
)";

constexpr const char* kTangentPair = R"(# two circles meeting tangentially at (1, 0, 0): a non-generic pair
map f1(x: circle) -> 3 = (cos x, sin x, 0)
map f2(y: circle) -> 3 = (2 + cos y, sin y, 0)
pair main = f1 f2
)";

constexpr const char* kTorus24 = R"(# (2,4) torus link, linking number -2
map f1(x: circle) -> 3 = ((2 + cos(2*x))*cos x, (2 + cos(2*x))*sin x, sin(2*x))
map f2(y: circle) -> 3 = ((2 - cos(2*y))*cos y, (2 - cos(2*y))*sin y, 0 - sin(2*y))
pair main = f1 f2
)";

constexpr const char* kTorus26 = R"(# (2,6) torus link, linking number -3
map f1(x: circle) -> 3 = ((2 + cos(3*x))*cos x, (2 + cos(3*x))*sin x, sin(3*x))
map f2(y: circle) -> 3 = ((2 - cos(3*y))*cos y, (2 - cos(3*y))*sin y, 0 - sin(3*y))
pair main = f1 f2
)";

constexpr const char* kUnlink3 = R"(# three distant round circles with the constant family
map c1(x: circle) -> 3 = (cos x, sin x, 0)
map c2(y: circle) -> 3 = (4 + cos y, sin y, 0)
map c3(z: circle) -> 3 = (8 + cos z, sin z, 0)
pair p12 = c1 c2
pair p23 = c2 c3
pair p31 = c3 c1
map F1(x: circle, u: interval 0 1) -> 3 = (cos x, sin x, 0)
map F2(y: circle, u: interval 0 1) -> 3 = (4 + cos y, sin y, 0)
map F3(z: circle, u: interval 0 1) -> 3 = (8 + cos z, sin z, 0)
map H12(x: circle, y: circle, t: interval 0 1, u: interval 0 1) -> 6 = (cos x, sin x, 0, 4 + cos y, sin y, 0)
map H23(y: circle, z: circle, t: interval 0 1, u: interval 0 1) -> 6 = (4 + cos y, sin y, 0, 8 + cos z, sin z, 0)
map H31(z: circle, x: circle, t: interval 0 1, u: interval 0 1) -> 6 = (8 + cos z, sin z, 0, cos x, sin x, 0)
triple rings = F1 F2 F3
lift main = rings : H12 H23 H31
)";

constexpr const char* kBorromean =
    R"(# borromean rings; component 2 slides out along the y-axis over u,
# bridged over component 3 by the weight t
map c1(x: circle) -> 3 = (0, 2*cos x, sin x)
map c2(y: circle) -> 3 = (cos y, 0, 2*sin y)
map c3(z: circle) -> 3 = (2*cos z, sin z, 0)
pair p12 = c1 c2
pair p23 = c2 c3
pair p31 = c3 c1
map F1(x: circle, u: interval 0 1) -> 3 = (0, 2*cos x, sin x)
map F2(y: circle, u: interval 0 1) -> 3 = (cos y, 4*u, 2*sin y)
map F3(z: circle, u: interval 0 1) -> 3 = (2*cos z, sin z, 0)
map H12(x: circle, y: circle, t: interval 0 1, u: interval 0 1) -> 6 = (0, 2*cos x, sin x, cos y, 4*u + 4*t*(1 - u), 2*sin y)
map H23(y: circle, z: circle, t: interval 0 1, u: interval 0 1) -> 6 = (cos y, 4*u, 2*sin y + t*(4 - (4*u - 2)^2), 2*cos z, sin z, 0)
map H31(z: circle, x: circle, t: interval 0 1, u: interval 0 1) -> 6 = (2*cos z, sin z, 0, 0, 2*cos x, sin x)
triple rings = F1 F2 F3
lift main = rings : H12 H23 H31
)";

constexpr const char* kBorromeanPerturbed =
    R"(# borromean rings with a small smooth perturbation of component 1
map c1(x: circle) -> 3 = (0.03*sin(2*x), 2*cos x + 0.02*cos(3*x), sin x)
map c2(y: circle) -> 3 = (cos y, 0, 2*sin y)
map c3(z: circle) -> 3 = (2*cos z, sin z, 0)
pair p12 = c1 c2
pair p23 = c2 c3
pair p31 = c3 c1
map F1(x: circle, u: interval 0 1) -> 3 = (0.03*sin(2*x), 2*cos x + 0.02*cos(3*x), sin x)
map F2(y: circle, u: interval 0 1) -> 3 = (cos y, 4*u, 2*sin y)
map F3(z: circle, u: interval 0 1) -> 3 = (2*cos z, sin z, 0)
map H12(x: circle, y: circle, t: interval 0 1, u: interval 0 1) -> 6 = (0.03*sin(2*x), 2*cos x + 0.02*cos(3*x), sin x, cos y, 4*u + 4*t*(1 - u), 2*sin y)
map H23(y: circle, z: circle, t: interval 0 1, u: interval 0 1) -> 6 = (cos y, 4*u, 2*sin y + t*(4 - (4*u - 2)^2), 2*cos z, sin z, 0)
map H31(z: circle, x: circle, t: interval 0 1, u: interval 0 1) -> 6 = (2*cos z, sin z, 0, 0.03*sin(2*x), 2*cos x + 0.02*cos(3*x), sin x)
triple rings = F1 F2 F3
lift main = rings : H12 H23 H31
)";

constexpr Builtin kBuiltins[] = {
    {"hopf", kHopf},
    {"unlink2", kUnlink2},
    {"unlink3", kUnlink3},
    {"torus-2-4", kTorus24},
    {"torus-2-6", kTorus26},
    {"borromean", kBorromean},
    {"borromean-perturbed", kBorromeanPerturbed},
    {"tangent-pair", kTangentPair},
};

}  // namespace

Scenario builtin_scenario(const std::string& name) {
  for (const auto& b : kBuiltins)
    if (name == b.name) return parse_scenario(b.text);
  throw UnknownIdentifier("no built-in scenario named '" + name + "'");
}

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> out;
  for (const auto& b : kBuiltins) out.push_back(b.name);
  return out;
}

bool is_builtin_scenario(const std::string& name) {
  for (const auto& b : kBuiltins)
    if (name == b.name) return true;
  return false;
}

}  // namespace linkeng
