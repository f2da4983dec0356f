#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "linkeng/link2.hpp"
#include "linkeng/mapfn.hpp"
#include "linkeng/solve.hpp"

namespace linkeng {

// Second-stage data for three circles in R^3 at a single configuration:
//   f[i] : x_i -> R^3              component maps
//   F[p] : (x_a, x_b) -> R^6       diagonal-avoiding pair maps
//   H[p] : (x_a, x_b, t) -> R^6    homotopies from f_a x f_b to F_ab
struct T2Point {
  std::array<ParamMap, 3> f;
  std::array<ParamMap, 3> F;
  std::array<ParamMap, 3> H;

  // sampled structural invariants; throws ValidationError
  void validate(double delta = 1e-3) const;
};

// One-parameter family (u in [0,1]) of second-stage link data for three
// circles in R^3:
//   f[i] : (x_i, u) -> R^3        family component maps
//   H[p] : (x_a, x_b, t, u) -> R^6  pair homotopies for pairs
//          p = 0: (1,2), p = 1: (2,3), p = 2: (3,1)
// At t = 0 each H restricts to the current pair of components, at t = 1 it
// avoids the diagonal, and at u = 1 the configuration is a genuine link.
struct T2Path {
  std::array<ParamMap, 3> f;
  std::array<ParamMap, 3> H;
  std::array<bool, 3> oriented{true, true, true};

  // sampled structural invariants; throws ValidationError / EndpointNotLink
  void validate(double delta = 1e-3) const;

  static constexpr std::array<std::array<int, 2>, 3> kPairs{
      {{0, 1}, {1, 2}, {2, 0}}};
  // index of the component not in pair p
  static int third(int p) { return (3 - kPairs[p][0] - kPairs[p][1]) % 3; }
};

struct WhitneyData {
  std::vector<TracedCurve> circles;  // parameter-space curves (x_a, x_b, t, u)
  // disk sampling: rulings[c][k] is the witness path gamma at the k-th
  // sample of circle c, as ambient points over sigma in [0,1]
  std::vector<std::vector<std::vector<Vec>>> rulings;
  // disk boundary polylines per circle: sigma = 0 (f_a side) and
  // sigma = 1 (f_b side)
  std::vector<std::vector<Vec>> boundary_a, boundary_b;
};

struct ObstructionPiece {
  std::string tag;          // "X1,(12)3", "X2,(23)1", "W(123)", ...
  std::string domain_desc;  // triangle/square factor of the parameter domain
  std::vector<TransversePoint> points;  // coords (x_h, x_i, x_j, s, t, u)
};

struct ObstructionReport {
  std::vector<ObstructionPiece> pieces;  // canonical order: X1 x3, X2 x3, W x3
  bool integer_coeffs = true;
  int mod2_total = 0;
  int signed_total = 0;  // meaningful only when integer_coeffs
  std::vector<std::string> notes;
};

// zero set of p1 H - p2 H: for a family homotopy (x_a, x_b, t, u) this is
// 1-dimensional and traced; for a single configuration (x_a, x_b, t) it is
// 0-dimensional and each zero is returned as a one-point curve
std::vector<TracedCurve> whitney_circle(const ParamMap& H,
                                        const SolverConfig& cfg);

// ruled-surface sampling of the Whitney disk along traced circles; the
// witness path through a circle point (x_a, x_b, t, u) runs
//   sigma in [0,1/2]: p1 H(x_a, x_b, 2 sigma t, u)
//   sigma in [1/2,1]: p2 H(x_a, x_b, (2 - 2 sigma) t, u)
WhitneyData whitney_disk(const ParamMap& H,
                         const std::vector<TracedCurve>& circles,
                         int sigma_samples = 16);

// X_{a,(hi)j}: intersections of the remaining component with the Whitney
// disk of pair p over the family; a = 1 uses the p1 side on the triangle
// {s <= t}, a = 2 the p2 side on {t <= s}
ObstructionPiece disk_component_intersections(const T2Path& path, int a,
                                              int p, const SolverConfig& cfg);

// W_{hij}: simultaneous Whitney-circle conditions of pairs (h,i) and (i,j)
// sharing the middle component; q indexes the cyclic triple by its first
// pair, q = 0: (123), q = 1: (231), q = 2: (312)
ObstructionPiece circle_circle_intersections(const T2Path& path, int q,
                                             const SolverConfig& cfg);

// all 6 X pieces and 3 W pieces, with mod-2 and signed totals
ObstructionReport assemble_obstruction(const T2Path& path,
                                       const SolverConfig& cfg);

// the built-in Borromean-rings family with its canonical lift
T2Path borromean_path();
// same family with a small smooth perturbation of component 1 (max 0.05)
T2Path borromean_perturbed_path();

struct BorromeanDemo {
  T2Path path;
  std::vector<TransversePoint> double_points;  // (y, z, tau), tau in [0,4]
  std::vector<TracedCurve> whitney;            // (y, z, t, u)
  double z_min = 0, z_max = 0;      // z-projection of the arc
  double tau_min = 0, tau_max = 0;  // homotopy-time range, original scale
  double det_max_err = 0;  // AD determinant vs closed form, 100 points
  WhitneyData disk;
  ObstructionPiece disk_intersection;  // the single-point piece X1,(23)1
  ObstructionReport report;
  int invariant_mod2 = 0;
  std::vector<std::string> notes;
};

BorromeanDemo borromean_demo(const SolverConfig& cfg);

}  // namespace linkeng
