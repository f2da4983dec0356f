#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "linkeng/mapfn.hpp"
#include "linkeng/solve.hpp"

namespace linkeng {

// Two-component link: closed-form component maps into a common R^n.
struct LinkPair {
  ParamMap f1, f2;
  bool oriented1 = true, oriented2 = true;

  int ambient_dim() const { return f1.dim_out; }
  // requires p1 + p2 + 1 == n for an integer linking number
  void validate_for_lk() const;
};

// Pair of time-extended component maps h_i(x_i, t), t in [0,1] as the last
// domain factor; t=0 is the basepoint end, t=1 the target end.
struct HomotopyPath {
  MapFn h1, h2;
};

struct LinkingManifoldResult {
  int dimension = 0;
  std::vector<TransversePoint> points;  // dimension 0
  std::vector<TracedCurve> curves;      // dimension 1
  bool integer_coeffs = true;           // Z when both components oriented

  int signed_count() const;
  int mod2_count() const;
};

// zero set of f1(x1) - f2(x2); empty iff the images are disjoint at solver
// resolution
LinkingManifoldResult double_points(const LinkPair& pair,
                                    const SolverConfig& cfg);

// zero set of h1(x1,t) - h2(x2,t) over P1 x P2 x [0,1]; for circles in R^3
// this is the 0-dimensional linking manifold with signs
LinkingManifoldResult linking_manifold(const HomotopyPath& path,
                                       const SolverConfig& cfg,
                                       bool integer_coeffs = true);

// signed count of zeros of f1(x1) - f2(x2) + t*d over P1 x P2 x (0, M);
// empty `direction` draws a seeded random unit vector, and non-transverse
// directions are retried with fresh draws (up to 8)
int lk_via_ray(const LinkPair& pair, Vec direction, const SolverConfig& cfg,
               std::uint64_t seed);

// degree of the normalized difference map at a regular value: solves the
// 2x2 system <f1 - f2, e> = <f1 - f2, e'> = 0 on the torus with
// <f1 - f2, d> < 0, signs from the full 3x3 determinant
int lk_via_regular_value(const LinkPair& pair, Vec direction,
                         const SolverConfig& cfg, std::uint64_t seed);

// double trapezoidal quadrature of the Gauss linking integral at the given
// per-axis resolution; throws ResolutionUnstable if doubling the resolution
// moves the value by more than 1e-3
double lk_via_gauss_quadrature(const LinkPair& pair, int resolution = 256);

// canonical two-stage split: translate component 2 out by M along a seeded
// direction, then contract both components to ball centers
HomotopyPath separation_homotopy(const LinkPair& pair, std::uint64_t seed);

// convenience: linking_manifold over a seeded separation homotopy, retrying
// with fresh directions on NonTransverse (up to 8)
LinkingManifoldResult lk_via_homotopy(const LinkPair& pair,
                                      const SolverConfig& cfg,
                                      std::uint64_t seed);

// witness path s in [0,1] |-> h(x, s*t): from the basepoint image to the
// double point of a linking-manifold zero
std::vector<Vec> witness_path(const MapFn& h, const Vec& x, double t,
                              int nsamples);

// precompose one circle factor with a reparametrization expressed over that
// map's own parameters; periodicity is re-checked
ParamMap precompose_circle(const ParamMap& m, int factor,
                           const Expression& rep);

Vec random_unit_vector(std::mt19937_64& rng, int n);
double min_image_distance(const MapFn& a, const MapFn& b, int samples = 64);

}  // namespace linkeng
