#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "linkeng/link2.hpp"
#include "linkeng/link3.hpp"

namespace linkeng {

// A scenario file is line-oriented; '#' starts a comment. Declarations:
//   map <dsl definition>                    define a parametrized map
//   pair <name> = <m1> <m2>                 two-component link
//   triple <name> = <m1> <m2> <m3>          three-component family
//   lift <name> = <triple> : <H12> <H23> <H31>
//   unoriented <map name>                   drop the orientation of a component
//   config <key> <value>                    solver config override
//   seed <u64>
// Pair components are products of circles; triple components and the H maps
// carry the family parameter u as their last factor.
struct Scenario {
  struct PairDecl {
    std::string name, m1, m2;
  };
  struct TripleDecl {
    std::string name;
    std::array<std::string, 3> comps;
  };
  struct LiftDecl {
    std::string name, triple;
    std::array<std::string, 3> H;
  };

  std::string text;  // verbatim source, input of the report digest
  std::map<std::string, ParamMap> maps;
  std::vector<PairDecl> pairs;
  std::vector<TripleDecl> triples;
  std::vector<LiftDecl> lifts;
  std::set<std::string> unoriented;
  SolverConfig cfg;

  const ParamMap& map(const std::string& name) const;
  LinkPair link_pair(const std::string& name) const;
  T2Path t2path(const std::string& lift_name) const;  // validated
  const PairDecl& pair_decl(const std::string& name) const;
  const LiftDecl& lift_decl(const std::string& name) const;
};

// parse scenario text; throws SyntaxError / ValidationError /
// UnknownIdentifier with line information in the message
Scenario parse_scenario(const std::string& text);

// named scenarios shipped with the tool; throws UnknownIdentifier
Scenario builtin_scenario(const std::string& name);
std::vector<std::string> builtin_scenario_names();
bool is_builtin_scenario(const std::string& name);

}  // namespace linkeng
