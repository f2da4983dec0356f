#include "linkeng/solve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "linkeng/errors.hpp"

namespace linkeng {

namespace {

constexpr int kMaxDim = 8;
using CellIndex = std::array<int, kMaxDim>;

std::vector<double> to_std(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// level resolutions, coarsest first; the last entry is the target grid
std::vector<std::vector<int>> build_levels(std::vector<int> res) {
  std::vector<std::vector<int>> levels{res};
  auto product_big = [](const std::vector<int>& r) {
    double p = 1;
    for (int x : r) p *= x;
    return p > 65536.0;
  };
  while (product_big(levels.front())) {
    std::vector<int> c = levels.front();
    for (auto& x : c) x = (x + 1) / 2;
    if (c == levels.front()) break;
    levels.insert(levels.begin(), c);
  }
  return levels;
}

Vec cell_center(const std::vector<DomainFactor>& dom, const CellIndex& I,
                const std::vector<int>& res) {
  const int k = (int)dom.size();
  Vec u(k);
  for (int j = 0; j < k; ++j)
    u[j] = dom[j].lower() + (I[j] + 0.5) * dom[j].width() / res[j];
  return u;
}

// Hierarchical grid scan: prune cells that cannot contain a zero using a
// sampled per-cell Lipschitz bound, refine survivors to the target grid.
// Deep levels are value-only: each child is first tested against the row
// bound inherited from its parent (rescaled to the child half-width), and
// Jacobians are re-sampled only for cells that survive.
std::vector<Vec> scan_candidates(const MapFn& F, const std::vector<int>& res,
                                 const SolverConfig& cfg, int rows) {
  const auto& dom = F.domain();
  const int k = (int)dom.size();
  const auto levels = build_levels(res);

  auto half_widths = [&](const std::vector<int>& r) {
    Vec h(k);
    for (int j = 0; j < k; ++j) h[j] = 0.5 * dom[j].width() / r[j];
    return h;
  };
  // conservative rescaling factor for row bounds from level a to level b
  auto shrink_ratio = [&](const std::vector<int>& ra,
                          const std::vector<int>& rb) {
    double s = 0;
    for (int j = 0; j < k; ++j) s = std::max(s, (double)ra[j] / rb[j]);
    return s;
  };
  // sum_j max|J(i,j)| h_j sampled at the center and two offset points
  auto row_bound = [&](const Vec& c, const Vec& h) {
    Vec val;
    Mat J;
    Vec rb = Vec::Zero(rows);
    for (int s = 0; s < 3; ++s) {
      Vec c2 = c;
      if (s > 0)
        for (int j = 0; j < k; ++j)
          c2[j] += (s == 1 ? 0.6 : -0.55) * ((j % 2) ? -h[j] : h[j]);
      F.jet(c2, val, J);
      for (int i = 0; i < rows; ++i) {
        double b = 0;
        for (int j = 0; j < k; ++j) b += std::abs(J(i, j)) * h[j];
        rb[i] = std::max(rb[i], b);
      }
    }
    return rb;
  };
  auto possible = [&](const Vec& val, const Vec& rb) {
    for (int i = 0; i < rows; ++i)
      if (std::abs(val[i]) > cfg.prune_safety * rb[i] + 1e-9) return false;
    return true;
  };

  struct Cand {
    CellIndex I;
    Vec child_bound;  // row bound rescaled to the next level
  };

  std::vector<Cand> cur;
  {
    // full enumeration of the coarsest level
    const auto& r0 = levels.front();
    const Vec h0 = half_widths(r0);
    const bool last = levels.size() == 1;
    const double ratio = last ? 0.0 : shrink_ratio(r0, levels[1]);
    std::int64_t total = 1;
    for (int j = 0; j < k; ++j) total *= r0[j];
    CellIndex I{};
    for (std::int64_t c = 0; c < total; ++c) {
      std::int64_t x = c;
      for (int j = 0; j < k; ++j) {
        I[j] = (int)(x % r0[j]);
        x /= r0[j];
      }
      const Vec ctr = cell_center(dom, I, r0);
      const Vec val = F.eval(ctr);
      Vec rb = row_bound(ctr, h0);
      if (!possible(val, rb)) continue;
      cur.push_back({I, last ? Vec() : Vec(rb * ratio)});
    }
  }

  for (std::size_t lev = 1; lev < levels.size(); ++lev) {
    const auto& rp = levels[lev - 1];
    const auto& rn = levels[lev];
    const bool last = lev + 1 == levels.size();
    const Vec hn = half_widths(rn);
    const double ratio = last ? 0.0 : shrink_ratio(rn, levels[lev + 1]);
    std::vector<Cand> next;
    for (const auto& parent : cur) {
      std::array<int, kMaxDim> lo{}, hi{};
      std::int64_t count = 1;
      for (int j = 0; j < k; ++j) {
        lo[j] = (int)((std::int64_t)parent.I[j] * rn[j] / rp[j]);
        hi[j] =
            (int)(((std::int64_t)(parent.I[j] + 1) * rn[j] + rp[j] - 1) /
                  rp[j]) -
            1;
        hi[j] = std::min(hi[j], rn[j] - 1);
        count *= hi[j] - lo[j] + 1;
      }
      CellIndex C{};
      for (std::int64_t c = 0; c < count; ++c) {
        std::int64_t x = c;
        for (int j = 0; j < k; ++j) {
          const int w = hi[j] - lo[j] + 1;
          C[j] = lo[j] + (int)(x % w);
          x /= w;
        }
        const Vec ctr = cell_center(dom, C, rn);
        const Vec val = F.eval(ctr);
        if (!possible(val, parent.child_bound)) continue;
        if (last) {
          next.push_back({C, Vec()});
        } else {
          Vec rb = row_bound(ctr, hn);
          if (!possible(val, rb)) continue;
          next.push_back({C, Vec(rb * ratio)});
        }
      }
      if (next.size() > 4u << 20)
        throw Error("grid scan explosion: too many candidate cells");
    }
    // sibling ranges may overlap when successive resolutions are not exact
    // multiples
    std::sort(next.begin(), next.end(),
              [](const Cand& a, const Cand& b) { return a.I < b.I; });
    next.erase(std::unique(next.begin(), next.end(),
                           [](const Cand& a, const Cand& b) {
                             return a.I == b.I;
                           }),
               next.end());
    cur.swap(next);
  }

  std::vector<Vec> seeds;
  seeds.reserve(cur.size());
  for (const auto& c : cur) seeds.push_back(cell_center(dom, c.I, res));
  return seeds;
}

bool in_domain(const std::vector<DomainFactor>& dom, const Vec& u,
               double tol) {
  for (int j = 0; j < (int)dom.size(); ++j)
    if (!dom[j].is_circle() &&
        (u[j] < dom[j].lo - tol || u[j] > dom[j].hi + tol))
      return false;
  return true;
}

Vec clamp_intervals(const std::vector<DomainFactor>& dom, Vec u) {
  for (int j = 0; j < (int)dom.size(); ++j)
    if (!dom[j].is_circle())
      u[j] = std::clamp(u[j], dom[j].lo, dom[j].hi);
  return u;
}

double excursion_limit(const DomainFactor& f) { return 0.1 * f.width(); }

// Damped Newton for the square system F = 0.
std::optional<Vec> newton_square(const MapFn& F, Vec u,
                                 const SolverConfig& cfg) {
  const auto& dom = F.domain();
  Vec val;
  Mat J;
  double r = std::numeric_limits<double>::max();
  for (int it = 0; it < cfg.max_newton_iter; ++it) {
    F.jet(u, val, J);
    r = val.norm();
    if (r <= cfg.newton_tol) return wrap_point(dom, u);
    Vec step = J.colPivHouseholderQr().solve(-val);
    if (!step.allFinite()) return std::nullopt;
    double lambda = 1.0;
    bool ok = false;
    for (int ls = 0; ls < 10; ++ls, lambda *= 0.5) {
      Vec cand = u + lambda * step;
      bool inside = true;
      for (int j = 0; j < (int)dom.size(); ++j)
        if (!dom[j].is_circle() &&
            (cand[j] < dom[j].lo - excursion_limit(dom[j]) ||
             cand[j] > dom[j].hi + excursion_limit(dom[j]))) {
          inside = false;
          break;
        }
      if (!inside) continue;
      // value-only trial; the accepted point is re-jetted next iteration
      const double r2 = F.eval(cand).norm();
      if (r2 < r || r2 <= cfg.newton_tol) {
        u = cand;
        r = r2;
        ok = true;
        break;
      }
    }
    if (!ok) return std::nullopt;
  }
  return r <= cfg.newton_tol ? std::optional<Vec>(wrap_point(dom, u))
                             : std::nullopt;
}

// after the tolerance is met, run full steps to the numerical floor; this
// sharpens sigma_min estimates near degenerate zeros
Vec polish_to_floor(const MapFn& F, Vec u) {
  Vec val;
  Mat J;
  double best = std::numeric_limits<double>::max();
  Vec best_u = u;
  for (int it = 0; it < 60; ++it) {
    F.jet(u, val, J);
    const double r = val.norm();
    if (r < best) {
      best = r;
      best_u = u;
    } else {
      break;
    }
    Vec step = J.colPivHouseholderQr().solve(-val);
    if (!step.allFinite()) break;
    u += step;
  }
  return best_u;
}

// Newton for F = 0 together with the affine constraint c.u = target
// (used as continuation corrector and for boundary landing).
std::optional<Vec> newton_constrained(const MapFn& F, const Vec& c,
                                      double target, Vec u,
                                      const SolverConfig& cfg, int maxit) {
  const int k = F.dim_in();
  const int m = F.dim_out();
  Vec val;
  Mat J;
  for (int it = 0; it < maxit; ++it) {
    F.jet(u, val, J);
    Vec rhs(m + 1);
    rhs.head(m) = -val;
    rhs[m] = target - c.dot(u);
    if (val.norm() <= cfg.newton_tol && std::abs(rhs[m]) <= 1e-12)
      return u;
    Mat A(m + 1, k);
    A.topRows(m) = J;
    A.row(m) = c.transpose();
    Vec step = A.colPivHouseholderQr().solve(rhs);
    if (!step.allFinite()) return std::nullopt;
    u += step;
  }
  F.jet(u, val, J);
  if (val.norm() <= cfg.newton_tol && std::abs(c.dot(u) - target) <= 1e-9)
    return u;
  return std::nullopt;
}

TransversePoint make_point(const MapFn& F, const Vec& u,
                           const SolverConfig& cfg) {
  TransversePoint pt;
  pt.u = wrap_point(F.domain(), polish_to_floor(F, u));
  Vec val;
  F.jet(pt.u, val, pt.jac);
  pt.residual = val.norm();
  Eigen::JacobiSVD<Mat> svd(pt.jac, Eigen::ComputeFullV);
  const double smax = svd.singularValues()[0];
  pt.sigma_min = svd.singularValues()[svd.singularValues().size() - 1];
  if (smax <= 0 || pt.sigma_min < cfg.sigma_min_rel * smax)
    throw NonTransverse(
        "zero with nearly singular Jacobian (sigma_min " +
            std::to_string(pt.sigma_min) + ", sigma_max " +
            std::to_string(smax) + "); the input family needs perturbation",
        to_std(pt.u));
  if (pt.sigma_min < 1e-4 * smax) {
    // suspicious conditioning: probe along the near-null direction; at a
    // genuinely transverse zero |F| grows linearly at rate sigma_min, at a
    // tangency the quadratic term dominates
    const Vec v = svd.matrixV().col(svd.matrixV().cols() - 1);
    const double h = 1e-5;
    const double d = std::max(F.eval(pt.u + h * v).norm(),
                              F.eval(pt.u - h * v).norm());
    if (d > 10.0 * h * pt.sigma_min)
      throw NonTransverse(
          "degenerate (tangential) zero: |F| grows quadratically along the "
          "null direction; the input family needs perturbation",
          to_std(pt.u));
  }
  const double det = pt.jac.determinant();
  pt.sign = det >= 0 ? 1 : -1;
  for (int j = 0; j < F.dim_in(); ++j) {
    const auto& f = F.domain()[j];
    if (!f.is_circle() && (pt.u[j] - f.lo < cfg.boundary_margin ||
                           f.hi - pt.u[j] < cfg.boundary_margin))
      pt.boundary_flag = true;
  }
  return pt;
}

void sort_points(std::vector<TransversePoint>& pts) {
  auto key = [](const Vec& u) {
    std::vector<double> k(u.size());
    for (int i = 0; i < u.size(); ++i) k[i] = std::round(u[i] * 1e9);
    return k;
  };
  std::sort(pts.begin(), pts.end(),
            [&](const TransversePoint& a, const TransversePoint& b) {
              return key(a.u) < key(b.u);
            });
}

std::vector<TransversePoint> find_zeros_once(const MapFn& F,
                                             const std::vector<int>& res,
                                             const SolverConfig& cfg) {
  auto seeds = scan_candidates(F, res, cfg, F.dim_out());
  std::vector<TransversePoint> out;
  for (const auto& s : seeds) {
    auto u = newton_square(F, s, cfg);
    if (!u) continue;
    if (!in_domain(F.domain(), *u, 1e-9)) continue;
    Vec v = clamp_intervals(F.domain(), *u);
    bool dup = false;
    for (auto& p : out) {
      if (domain_distance(F.domain(), p.u, v) < cfg.dedup_radius) {
        dup = true;
        // cheap residual pre-check before re-polishing a duplicate
        if (F.eval(v).norm() < p.residual) {
          TransversePoint cand = make_point(F, v, cfg);
          if (cand.residual < p.residual) p = cand;
        }
        break;
      }
    }
    if (!dup) out.push_back(make_point(F, v, cfg));
  }
  sort_points(out);
  return out;
}

bool same_result(const std::vector<TransversePoint>& a,
                 const std::vector<TransversePoint>& b,
                 const std::vector<DomainFactor>& dom) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].sign != b[i].sign) return false;
    if (domain_distance(dom, a[i].u, b[i].u) > 1e-6) return false;
  }
  return true;
}

}  // namespace

std::optional<TransversePoint> newton_polish(const MapFn& F, Vec u0,
                                             const SolverConfig& cfg) {
  auto u = newton_square(F, std::move(u0), cfg);
  if (!u || !in_domain(F.domain(), *u, 1e-9)) return std::nullopt;
  return make_point(F, clamp_intervals(F.domain(), *u), cfg);
}

std::vector<TransversePoint> find_zeros_0d(const ZeroProblem& p) {
  const MapFn& F = p.F;
  if (F.dim_in() != F.dim_out())
    throw ValidationError("find_zeros_0d requires a square system, got " +
                          std::to_string(F.dim_out()) + " equations in " +
                          std::to_string(F.dim_in()) + " unknowns");
  std::vector<int> res = p.cfg.resolutions(F.dim_in());
  auto cur = find_zeros_once(F, res, p.cfg);
  for (int depth = 0; depth <= p.cfg.max_refine_depth; ++depth) {
    std::vector<int> res2 = res;
    for (auto& r : res2) r *= 2;
    auto fine = find_zeros_once(F, res2, p.cfg);
    if (same_result(cur, fine, F.domain())) return fine;
    cur = std::move(fine);
    res = std::move(res2);
  }
  throw ResolutionUnstable(
      "zero counts did not stabilize under grid refinement (depth " +
      std::to_string(p.cfg.max_refine_depth) + ")");
}

int orientation_sign(const TransversePoint& pt,
                     const std::vector<int>& ordering) {
  const int k = (int)ordering.size();
  Mat P(k, k);
  for (int c = 0; c < k; ++c) P.col(c) = pt.jac.col(ordering[c]);
  return P.determinant() >= 0 ? 1 : -1;
}

// ---------------------------------------------------------------------------
// curve tracing

namespace {

Vec kernel_tangent(const Mat& J, const SolverConfig& cfg, const Vec& where) {
  Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // J is m x (m+1); transversality means all m singular values stay well
  // away from zero
  if (sv[0] <= 0 || sv[sv.size() - 1] < cfg.sigma_min_rel * sv[0])
    throw NonTransverse("rank drop along traced curve",
                        to_std(where));
  return svd.matrixV().col(J.cols() - 1);
}

struct TraceState {
  std::vector<Vec> pts;
  std::optional<StratumTag> tag;
  bool closed = false;
};

}  // namespace

std::vector<TracedCurve> trace_zeros_1d(const ZeroProblem& p) {
  const MapFn& F = p.F;
  const auto& dom = F.domain();
  const int k = F.dim_in();
  const int m = F.dim_out();
  if (k != m + 1)
    throw ValidationError(
        "trace_zeros_1d requires one more unknown than equations");
  const SolverConfig& cfg = p.cfg;
  std::vector<int> res = cfg.resolutions(k);

  double min_cell = std::numeric_limits<double>::max();
  for (int j = 0; j < k; ++j)
    min_cell = std::min(min_cell, dom[j].width() / res[j]);
  const double h_max = 0.5 * min_cell;
  const double h_floor = 1e-8;

  // seeds: survivors of the grid scan projected onto the curve by a
  // minimal-norm Gauss-Newton iteration
  auto cand = scan_candidates(F, res, cfg, m);
  std::vector<Vec> seeds;
  for (auto& s : cand) {
    Vec u = s, val;
    Mat J;
    bool conv = false;
    for (int it = 0; it < cfg.max_newton_iter; ++it) {
      F.jet(u, val, J);
      if (val.norm() <= cfg.newton_tol) {
        conv = true;
        break;
      }
      Vec step = J.transpose() *
                 (J * J.transpose()).ldlt().solve(-val);
      if (!step.allFinite()) break;
      u += step;
    }
    if (!conv || !in_domain(dom, u, 1e-9)) continue;
    u = clamp_intervals(dom, wrap_point(dom, u));
    bool dup = false;
    for (const auto& t : seeds)
      if (domain_distance(dom, t, u) < 0.5 * min_cell) {
        dup = true;
        break;
      }
    if (!dup) seeds.push_back(u);
  }
  std::sort(seeds.begin(), seeds.end(), [](const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(),
                                        b.data(), b.data() + b.size());
  });

  std::vector<bool> used(seeds.size(), false);
  std::vector<TracedCurve> curves;

  auto residual_ok = [&](const Vec& u) {
    return F.eval(u).norm() <= cfg.newton_tol;
  };

  // trace from `start` in the direction `dir0`; returns points beyond the
  // start point (start itself not included)
  auto trace_dir = [&](const Vec& start, const Vec& dir0,
                       TraceState& st) {
    Vec u = start;
    Vec t = dir0;
    double h = std::min(h_max, 0.5 * min_cell);
    Vec val;
    Mat J;
    const int max_points = 200000;
    while ((int)st.pts.size() < max_points) {
      bool stepped = false;
      while (h >= h_floor) {
        Vec pred = u + h * t;
        auto corr = newton_constrained(F, t, t.dot(pred), pred, cfg, 10);
        if (corr) {
          // boundary crossing?
          int bfac = -1, bend = 0;
          for (int j = 0; j < k && bfac < 0; ++j) {
            if (dom[j].is_circle()) continue;
            if ((*corr)[j] < dom[j].lo - 1e-12) {
              bfac = j;
              bend = 0;
            } else if ((*corr)[j] > dom[j].hi + 1e-12) {
              bfac = j;
              bend = 1;
            }
          }
          if (bfac >= 0) {
            const double bound = bend ? dom[bfac].hi : dom[bfac].lo;
            Vec c = Vec::Zero(k);
            c[bfac] = 1.0;
            Vec mid = 0.5 * (u + *corr);
            auto land = newton_constrained(F, c, bound, mid, cfg, 20);
            if (!land) land = newton_constrained(F, c, bound, u, cfg, 20);
            if (land && in_domain(dom, *land, 1e-6)) {
              Vec lp = clamp_intervals(dom, *land);
              st.pts.push_back(lp);
              st.tag = StratumTag{bfac, bend};
              return;
            }
            // could not land; shrink and retry
            h *= 0.5;
            continue;
          }
          F.jet(*corr, val, J);
          Vec tn = kernel_tangent(J, cfg, *corr);
          if (tn.dot(t) < 0) tn = -tn;
          if (tn.dot(t) < 0.95 && h > 4 * h_floor) {
            h *= 0.5;  // sharp turn: refine the step
            continue;
          }
          u = *corr;
          // keep interval coordinates exact, wrap circles for storage
          st.pts.push_back(wrap_point(dom, u));
          t = tn;
          stepped = true;
          if (h < h_max) h = std::min(h_max, 1.3 * h);
          break;
        }
        h *= 0.5;
      }
      if (!stepped && !st.tag) {
        if (h < h_floor)
          throw StepCollapse("continuation step collapsed",
                             to_std(u));
        return;
      }
      if (!stepped) return;
      // closure test against the trace start
      if (st.pts.size() > 4) {
        const double d = domain_distance(dom, st.pts.back(), start);
        if (d < 0.75 * h) {
          st.pts.push_back(start);
          st.closed = true;
          return;
        }
      }
    }
    throw Error("traced curve exceeded the sample budget");
  };

  for (std::size_t si = 0; si < seeds.size(); ++si) {
    if (used[si]) continue;
    used[si] = true;
    const Vec& s0 = seeds[si];
    Vec val;
    Mat J;
    F.jet(s0, val, J);
    Vec t0 = kernel_tangent(J, cfg, s0);
    // canonical initial direction
    for (int j = 0; j < k; ++j) {
      if (std::abs(t0[j]) > 1e-12) {
        if (t0[j] < 0) t0 = -t0;
        break;
      }
    }

    TraceState fwd, bwd;
    trace_dir(s0, t0, fwd);
    TracedCurve cur;
    if (fwd.closed) {
      cur.points.push_back(s0);
      cur.points.insert(cur.points.end(), fwd.pts.begin(), fwd.pts.end());
      cur.closed = true;
    } else {
      trace_dir(s0, -t0, bwd);
      cur.points.assign(bwd.pts.rbegin(), bwd.pts.rend());
      cur.points.push_back(s0);
      cur.points.insert(cur.points.end(), fwd.pts.begin(), fwd.pts.end());
      cur.start_tag = bwd.tag;
      cur.end_tag = fwd.tag;
    }

    // consume seeds covered by this component
    for (std::size_t sj = 0; sj < seeds.size(); ++sj) {
      if (used[sj]) continue;
      for (const auto& q : cur.points)
        if (domain_distance(dom, seeds[sj], q) < std::max(2 * h_max, min_cell)) {
          used[sj] = true;
          break;
        }
    }

    // canonical orientation
    auto lex_less = [&](const Vec& a, const Vec& b) {
      return std::lexicographical_compare(a.data(), a.data() + k, b.data(),
                                          b.data() + k);
    };
    if (cur.closed) {
      std::size_t best = 0;
      for (std::size_t i = 1; i + 1 < cur.points.size(); ++i)
        if (lex_less(cur.points[i], cur.points[best])) best = i;
      if (best != 0) {
        std::vector<Vec> rot;
        rot.reserve(cur.points.size());
        for (std::size_t i = 0; i + 1 < cur.points.size(); ++i)
          rot.push_back(cur.points[(best + i) % (cur.points.size() - 1)]);
        rot.push_back(rot.front());
        cur.points = std::move(rot);
      }
    } else if (!cur.points.empty() &&
               lex_less(cur.points.back(), cur.points.front())) {
      std::reverse(cur.points.begin(), cur.points.end());
      std::swap(cur.start_tag, cur.end_tag);
    }

    for (std::size_t i = 0; i + 1 < cur.points.size(); ++i)
      cur.arc_length += domain_distance(dom, cur.points[i], cur.points[i + 1]);

    // invariants
    for (const auto& q : cur.points)
      if (!residual_ok(q))
        throw Error("internal: traced sample violates residual tolerance");
    curves.push_back(std::move(cur));
  }

  std::sort(curves.begin(), curves.end(),
            [&](const TracedCurve& a, const TracedCurve& b) {
              if (a.points.empty() || b.points.empty())
                return a.points.size() < b.points.size();
              return std::lexicographical_compare(
                  a.points.front().data(), a.points.front().data() + k,
                  b.points.front().data(), b.points.front().data() + k);
            });
  return curves;
}

}  // namespace linkeng
