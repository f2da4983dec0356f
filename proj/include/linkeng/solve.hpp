#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "linkeng/mapfn.hpp"

namespace linkeng {

struct SolverConfig {
  int resolution = 64;            // grid resolution per factor
  std::vector<int> per_factor;    // optional per-factor override
  double newton_tol = 1e-10;      // residual (2-norm) tolerance
  double dedup_radius = 1e-6;     // parameter-space dedup (periodic metric)
  double sigma_min_rel = 1e-8;    // min singular value, relative to sigma_max
  int max_refine_depth = 3;
  double boundary_margin = 1e-4;  // interval-endpoint proximity flagging
  std::uint64_t seed = 0;
  int max_newton_iter = 40;
  double prune_safety = 4.0;      // slack on the cell Lipschitz bound

  std::vector<int> resolutions(int k) const {
    if (!per_factor.empty()) return per_factor;
    return std::vector<int>(k, resolution);
  }
};

struct ZeroProblem {
  MapFn F;
  SolverConfig cfg;
};

struct TransversePoint {
  Vec u;                // wrapped coordinates
  double residual = 0;  // |F(u)|_2
  Mat jac;              // square Jacobian at u
  int sign = 0;         // sign of det(jac)
  double sigma_min = 0;
  bool boundary_flag = false;  // within boundary_margin of an interval end
};

struct StratumTag {
  int factor = -1;  // interval factor index
  int end = 0;      // 0 = lower bound, 1 = upper bound
};

struct TracedCurve {
  std::vector<Vec> points;  // wrapped samples
  bool closed = false;
  std::optional<StratumTag> start_tag, end_tag;  // set for open arcs
  double arc_length = 0;
};

// isolated transverse zeros of a square system (k = m), canonically sorted
std::vector<TransversePoint> find_zeros_0d(const ZeroProblem& p);

// connected 1-dimensional zero-set components of a one-deficient system
// (k = m + 1), traced by predictor-corrector continuation
std::vector<TracedCurve> trace_zeros_1d(const ZeroProblem& p);

// sign of det(jac) after permuting columns by `ordering`
int orientation_sign(const TransversePoint& pt,
                     const std::vector<int>& ordering);

// single Newton polish from a given start (used by callers that know a
// good seed); returns nullopt when not converged
std::optional<TransversePoint> newton_polish(const MapFn& F, Vec u0,
                                             const SolverConfig& cfg);

}  // namespace linkeng
