#include "linkeng/link2.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "linkeng/errors.hpp"

namespace linkeng {

namespace {

// Sign conventions of the three methods are pinned to each other so that
// every method reports the classical Gauss-integral linking number.
constexpr int kRaySign = 1;
constexpr int kDegreeSign = 1;

bool all_circles(const ParamMap& m) {
  for (const auto& f : m.domain)
    if (!f.is_circle()) return false;
  return true;
}

struct ImageStats {
  Vec center;
  double radius = 0;
};

ImageStats image_stats(const MapFn& f, int samples_per_factor = 64) {
  const int k = f.dim_in();
  const int n = f.dim_out();
  std::int64_t total = 1;
  for (int j = 0; j < k; ++j) total *= samples_per_factor;
  Vec c = Vec::Zero(n);
  std::vector<Vec> pts;
  pts.reserve((std::size_t)total);
  for (std::int64_t idx = 0; idx < total; ++idx) {
    std::int64_t x = idx;
    Vec u(k);
    for (int j = 0; j < k; ++j) {
      const auto& d = f.domain()[j];
      u[j] = d.lower() + (x % samples_per_factor) * d.width() / samples_per_factor;
      x /= samples_per_factor;
    }
    pts.push_back(f.eval(u));
    c += pts.back();
  }
  c /= (double)total;
  ImageStats st;
  st.center = c;
  for (const auto& p : pts) st.radius = std::max(st.radius, (p - c).norm());
  return st;
}

MapFn difference_with_ray(const MapFn& f1, const MapFn& f2, const Vec& d,
                          double M) {
  auto fp = std::make_shared<MapFn>(f1);
  auto gp = std::make_shared<MapFn>(f2);
  const int p1 = f1.dim_in(), p2 = f2.dim_in(), n = f1.dim_out();
  std::vector<DomainFactor> dom = concat_domains(f1.domain(), f2.domain());
  DomainFactor tf;
  tf.kind = DomainFactor::Kind::Interval;
  tf.name = "t";
  tf.lo = 0.0;
  tf.hi = M;
  dom.push_back(tf);
  std::vector<double> dv(d.data(), d.data() + d.size());
  return MapFn(std::move(dom), n,
               [fp, gp, p1, p2, n, dv]<typename T>(std::span<const T> u,
                                                   std::span<T> out) {
                 std::vector<T> b(n);
                 fp->call(u.subspan(0, p1), out);
                 gp->call(u.subspan(p1, p2), std::span<T>(b));
                 const T& t = u[p1 + p2];
                 for (int i = 0; i < n; ++i)
                   out[i] = out[i] - b[i] + t * T(dv[i]);
               });
}

MapFn path_gap(const HomotopyPath& path) {
  auto h1 = std::make_shared<MapFn>(path.h1);
  auto h2 = std::make_shared<MapFn>(path.h2);
  const int p1 = path.h1.dim_in() - 1, p2 = path.h2.dim_in() - 1;
  const int n = path.h1.dim_out();
  std::vector<DomainFactor> dom;
  for (int j = 0; j < p1; ++j) dom.push_back(path.h1.domain()[j]);
  for (int j = 0; j < p2; ++j) dom.push_back(path.h2.domain()[j]);
  dom.push_back(path.h1.domain()[p1]);  // shared t factor
  return MapFn(std::move(dom), n,
               [h1, h2, p1, p2, n]<typename T>(std::span<const T> u,
                                               std::span<T> out) {
                 std::vector<T> a(p1 + 1), b(p2 + 1), vb(n);
                 for (int j = 0; j < p1; ++j) a[j] = u[j];
                 a[p1] = u[p1 + p2];
                 for (int j = 0; j < p2; ++j) b[j] = u[p1 + j];
                 b[p2] = u[p1 + p2];
                 h1->call(std::span<const T>(a), out);
                 h2->call(std::span<const T>(b), std::span<T>(vb));
                 for (int i = 0; i < n; ++i) out[i] = out[i] - vb[i];
               });
}

// sampled minimum image distance sharpened by Levenberg-Marquardt descent
// from the best sampled pair; sampling alone can overestimate the minimum
// near a transverse crossing by the grid spacing
double refined_min_image_distance(const MapFn& a, const MapFn& b,
                                  int samples = 32) {
  auto grid = [&](const MapFn& f) {
    const int k = f.dim_in();
    std::int64_t total = 1;
    for (int j = 0; j < k; ++j) total *= samples;
    std::vector<Vec> us;
    us.reserve((std::size_t)total);
    for (std::int64_t idx = 0; idx < total; ++idx) {
      std::int64_t x = idx;
      Vec u(k);
      for (int j = 0; j < k; ++j) {
        const auto& d = f.domain()[j];
        u[j] = d.lower() + (x % samples) * d.width() / samples;
        x /= samples;
      }
      us.push_back(std::move(u));
    }
    return us;
  };
  const auto ua = grid(a), ub = grid(b);
  std::vector<Vec> va, vb;
  va.reserve(ua.size());
  vb.reserve(ub.size());
  for (const auto& u : ua) va.push_back(a.eval(u));
  for (const auto& u : ub) vb.push_back(b.eval(u));
  double best = std::numeric_limits<double>::max();
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < va.size(); ++i)
    for (std::size_t j = 0; j < vb.size(); ++j) {
      const double d = (va[i] - vb[j]).norm();
      if (d < best) {
        best = d;
        bi = i;
        bj = j;
      }
    }

  const MapFn gap = pair_difference(a, b);
  const auto& dom = gap.domain();
  const int k = gap.dim_in();
  Vec u(k);
  u.head(a.dim_in()) = ua[bi];
  u.tail(b.dim_in()) = ub[bj];
  Vec g;
  Mat J;
  gap.jet(u, g, J);
  double r = g.norm(), lambda = 1e-6;
  for (int it = 0; it < 50 && r > 1e-12; ++it) {
    Mat A = J.transpose() * J;
    A.diagonal().array() += lambda;
    Vec step = A.ldlt().solve(-J.transpose() * g);
    Vec cand = u + step;
    for (int j = 0; j < k; ++j)
      if (!dom[j].is_circle())
        cand[j] = std::clamp(cand[j], dom[j].lo, dom[j].hi);
    const double r2 = gap.eval(cand).norm();
    if (r2 < r) {
      u = cand;
      gap.jet(u, g, J);
      r = g.norm();
      lambda = std::max(lambda / 3.0, 1e-12);
    } else {
      lambda *= 10.0;
      if (lambda > 1e8) break;
    }
  }
  return std::min(best, r);
}

}  // namespace

void LinkPair::validate_for_lk() const {
  if (f1.dim_out != f2.dim_out)
    throw ValidationError("link components must share a target dimension");
  if (!all_circles(f1) || !all_circles(f2))
    throw ValidationError("link components must be products of circles");
  const int p1 = f1.dim_in(), p2 = f2.dim_in(), n = f1.dim_out;
  if (p1 + p2 + 1 != n)
    throw ValidationError(
        "integer linking number requires p1 + p2 + 1 = n, got p1 = " +
        std::to_string(p1) + ", p2 = " + std::to_string(p2) +
        ", n = " + std::to_string(n));
}

int LinkingManifoldResult::signed_count() const {
  if (!integer_coeffs)
    throw ValidationError(
        "signed count undefined over Z/2 (unoriented component)");
  int s = 0;
  for (const auto& p : points) s += p.sign;
  return s;
}

int LinkingManifoldResult::mod2_count() const {
  return (int)(points.size() % 2);
}

LinkingManifoldResult double_points(const LinkPair& pair,
                                    const SolverConfig& cfg) {
  const MapFn f1(pair.f1), f2(pair.f2);
  const int p1 = f1.dim_in(), p2 = f2.dim_in(), n = f1.dim_out();
  if (f1.dim_out() != f2.dim_out())
    throw ValidationError("link components must share a target dimension");
  const int dim = p1 + p2 - n;
  if (dim != 0 && dim != -1)
    throw ValidationError("double_points supports p1 + p2 - n in {0, -1}");
  LinkingManifoldResult r;
  r.dimension = std::max(dim, 0);
  r.integer_coeffs = pair.oriented1 && pair.oriented2;
  if (dim == -1) {
    // overdetermined: generic images are disjoint; confirm by sampled
    // minimum distance and report empty, without a square solve
    if (refined_min_image_distance(f1, f2) < 1e-6)
      throw NonTransverse(
          "images of an overdetermined pair come too close; the "
          "configuration is not generic");
    return r;
  }
  r.points = find_zeros_0d({pair_difference(f1, f2), cfg});
  return r;
}

LinkingManifoldResult linking_manifold(const HomotopyPath& path,
                                       const SolverConfig& cfg,
                                       bool integer_coeffs) {
  const int p1 = path.h1.dim_in() - 1, p2 = path.h2.dim_in() - 1;
  const int n = path.h1.dim_out();
  if (path.h2.dim_out() != n)
    throw ValidationError("homotopy components must share a target dimension");
  // the target end must be a link map
  MapFn end1 = fix_coord(path.h1, p1, 1.0);
  MapFn end2 = fix_coord(path.h2, p2, 1.0);
  if (refined_min_image_distance(end1, end2) < 1e-3)
    throw EndpointNotLink(
        "images at t = 1 are not separated; the path endpoint is not a link "
        "map");
  LinkingManifoldResult r;
  r.dimension = p1 + p2 + 1 - n;
  r.integer_coeffs = integer_coeffs;
  MapFn F = path_gap(path);
  if (r.dimension == 0) {
    r.points = find_zeros_0d({F, cfg});
    for (const auto& pt : r.points)
      if (pt.boundary_flag)
        throw NonTransverse(
            "linking-manifold zero within the boundary margin of t in {0,1}",
            std::vector<double>(pt.u.data(), pt.u.data() + pt.u.size()));
  } else if (r.dimension == 1) {
    r.curves = trace_zeros_1d({F, cfg});
  } else {
    throw ValidationError("linking manifold dimension must be 0 or 1");
  }
  return r;
}

int lk_via_ray(const LinkPair& pair, Vec direction, const SolverConfig& cfg,
               std::uint64_t seed) {
  pair.validate_for_lk();
  const MapFn f1(pair.f1), f2(pair.f2);
  const int n = f1.dim_out();
  if (refined_min_image_distance(f1, f2) < 1e-3)
    throw NonTransverse("component images are not separated");
  const ImageStats s1 = image_stats(f1), s2 = image_stats(f2);
  const double M = (s1.center - s2.center).norm() + s1.radius + s2.radius + 2.0;
  std::mt19937_64 rng(seed);
  std::string last;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Vec d;
    if (attempt == 0 && direction.size() == n && direction.norm() > 0)
      d = direction.normalized();
    else
      d = random_unit_vector(rng, n);
    try {
      auto pts = find_zeros_0d({difference_with_ray(f1, f2, d, M), cfg});
      int total = 0;
      for (const auto& p : pts) {
        if (p.boundary_flag)
          throw NonTransverse("ray zero within the boundary margin of t");
        total += p.sign;
      }
      return kRaySign * total;
    } catch (const NonTransverse& e) {
      last = e.what();
    }
  }
  throw NonTransverse("no regular ray direction found after 8 retries (" +
                      last + ")");
}

int lk_via_regular_value(const LinkPair& pair, Vec direction,
                         const SolverConfig& cfg, std::uint64_t seed) {
  pair.validate_for_lk();
  const MapFn f1(pair.f1), f2(pair.f2);
  const int n = f1.dim_out();
  if (n != 3)
    throw ValidationError("regular-value method implemented for n = 3");
  if (refined_min_image_distance(f1, f2) < 1e-3)
    throw NonTransverse("component images are not separated");
  std::mt19937_64 rng(seed);
  std::string last;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Vec d;
    if (attempt == 0 && direction.size() == n && direction.norm() > 0)
      d = direction.normalized();
    else
      d = random_unit_vector(rng, n);
    // right-handed orthonormal frame (e, ep, d)
    int least = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(d[i]) < std::abs(d[least])) least = i;
    Vec e = Vec::Zero(3);
    e[least] = 1.0;
    e = (e - e.dot(d) * d).normalized();
    Vec ep(3);
    ep << d[1] * e[2] - d[2] * e[1], d[2] * e[0] - d[0] * e[2],
        d[0] * e[1] - d[1] * e[0];

    auto fp = std::make_shared<MapFn>(f1);
    auto gp = std::make_shared<MapFn>(f2);
    std::vector<double> ev(e.data(), e.data() + 3),
        epv(ep.data(), ep.data() + 3);
    MapFn proj(concat_domains(f1.domain(), f2.domain()), 2,
               [fp, gp, p1 = f1.dim_in(), ev, epv]<typename T>(
                   std::span<const T> u, std::span<T> out) {
                 std::vector<T> a(3), b(3);
                 fp->call(u.subspan(0, (std::size_t)p1), std::span<T>(a));
                 gp->call(u.subspan((std::size_t)p1), std::span<T>(b));
                 T g0 = a[0] - b[0], g1 = a[1] - b[1], g2 = a[2] - b[2];
                 out[0] = T(ev[0]) * g0 + T(ev[1]) * g1 + T(ev[2]) * g2;
                 out[1] = T(epv[0]) * g0 + T(epv[1]) * g1 + T(epv[2]) * g2;
               });
    try {
      auto pts = find_zeros_0d({proj, cfg});
      int total = 0;
      for (const auto& p : pts) {
        Vec x1 = p.u.head(f1.dim_in());
        Vec x2 = p.u.tail(f2.dim_in());
        Vec g = f1.eval(x1) - f2.eval(x2);
        if (g.dot(d) >= 0) continue;  // preimage of the antipode
        // sign from the full 3x3 determinant [dg/dx1, dg/dx2, d]
        Mat A(3, 3);
        A.col(0) = f1.jacobian(x1).col(0);
        A.col(1) = -f2.jacobian(x2).col(0);
        A.col(2) = d;
        total += A.determinant() >= 0 ? 1 : -1;
      }
      return kDegreeSign * total;
    } catch (const NonTransverse& e) {
      last = e.what();
    }
  }
  throw NonTransverse("no regular value found after 8 retries (" + last + ")");
}

namespace {

double gauss_quadrature_once(const MapFn& f1, const MapFn& f2, int res) {
  // precompute samples and tangents along each curve
  std::vector<Vec> a(res), da(res), b(res), db(res);
  for (int i = 0; i < res; ++i) {
    Vec u(1);
    u << kTwoPi * i / res;
    Vec val;
    Mat J;
    f1.jet(u, val, J);
    a[i] = val;
    da[i] = J.col(0);
    f2.jet(u, val, J);
    b[i] = val;
    db[i] = J.col(0);
  }
  double sum = 0;
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j) {
      Vec r = a[i] - b[j];
      const double rn = r.norm();
      Mat A(3, 3);
      A.col(0) = da[i];
      A.col(1) = db[j];
      A.col(2) = r;
      sum += A.determinant() / (rn * rn * rn);
    }
  const double h = kTwoPi / res;
  return sum * h * h / (4.0 * kPi);
}

}  // namespace

double lk_via_gauss_quadrature(const LinkPair& pair, int resolution) {
  pair.validate_for_lk();
  const MapFn f1(pair.f1), f2(pair.f2);
  if (pair.ambient_dim() != 3 || f1.dim_in() != 1 || f2.dim_in() != 1)
    throw ValidationError(
        "Gauss quadrature implemented for single circles in R^3");
  const double v1 = gauss_quadrature_once(f1, f2, resolution);
  const double v2 = gauss_quadrature_once(f1, f2, 2 * resolution);
  if (std::abs(v1 - v2) > 1e-3)
    throw ResolutionUnstable(
        "Gauss quadrature has not converged: value moved by " +
        std::to_string(std::abs(v1 - v2)) + " under refinement");
  return v2;
}

HomotopyPath separation_homotopy(const LinkPair& pair, std::uint64_t seed) {
  pair.validate_for_lk();
  const MapFn f1(pair.f1), f2(pair.f2);
  const int n = f1.dim_out();
  std::mt19937_64 rng(seed);
  const Vec d = random_unit_vector(rng, n);
  const ImageStats s1 = image_stats(f1), s2 = image_stats(f2);
  const double M = (s1.center - s2.center).norm() + s1.radius + s2.radius + 2.0;

  DomainFactor tf;
  tf.kind = DomainFactor::Kind::Interval;
  tf.name = "t";
  tf.lo = 0.0;
  tf.hi = 1.0;

  auto fp = std::make_shared<MapFn>(f1);
  std::vector<double> c1(s1.center.data(), s1.center.data() + n);
  std::vector<DomainFactor> dom1 = f1.domain();
  dom1.push_back(tf);
  MapFn h1(std::move(dom1), n,
           [fp, n, c1, p = f1.dim_in()]<typename T>(std::span<const T> u,
                                                    std::span<T> out) {
             fp->call(u.subspan(0, (std::size_t)p), out);
             const T& t = u[p];
             if (value_of(t) > 0.5) {
               // contraction leg: (2-2t) f + (2t-1) c
               for (int i = 0; i < n; ++i)
                 out[i] = (T(2.0) - T(2.0) * t) * out[i] +
                          (T(2.0) * t - T(1.0)) * T(c1[i]);
             }
           });

  auto gp = std::make_shared<MapFn>(f2);
  std::vector<double> c2(n), dv(d.data(), d.data() + n);
  for (int i = 0; i < n; ++i) c2[i] = s2.center[i];
  std::vector<DomainFactor> dom2 = f2.domain();
  dom2.push_back(tf);
  MapFn h2(std::move(dom2), n,
           [gp, n, c2, dv, M, p = f2.dim_in()]<typename T>(
               std::span<const T> u, std::span<T> out) {
             gp->call(u.subspan(0, (std::size_t)p), out);
             const T& t = u[p];
             if (value_of(t) <= 0.5) {
               // translation leg: f2 - 2Mt d
               for (int i = 0; i < n; ++i)
                 out[i] = out[i] - T(2.0 * M) * t * T(dv[i]);
             } else {
               for (int i = 0; i < n; ++i)
                 out[i] = (T(2.0) - T(2.0) * t) * out[i] +
                          (T(2.0) * t - T(1.0)) * T(c2[i]) - T(M) * T(dv[i]);
             }
           });
  return HomotopyPath{std::move(h1), std::move(h2)};
}

LinkingManifoldResult lk_via_homotopy(const LinkPair& pair,
                                      const SolverConfig& cfg,
                                      std::uint64_t seed) {
  std::string last;
  for (int attempt = 0; attempt < 8; ++attempt) {
    try {
      return linking_manifold(separation_homotopy(pair, seed + attempt), cfg,
                              pair.oriented1 && pair.oriented2);
    } catch (const NonTransverse& e) {
      last = e.what();
    }
  }
  throw NonTransverse("no regular separation direction after 8 retries (" +
                      last + ")");
}

std::vector<Vec> witness_path(const MapFn& h, const Vec& x, double t,
                              int nsamples) {
  const int p = h.dim_in() - 1;
  std::vector<Vec> out;
  out.reserve(nsamples + 1);
  for (int i = 0; i <= nsamples; ++i) {
    Vec u(p + 1);
    u.head(p) = x;
    u[p] = t * i / nsamples;
    out.push_back(h.eval(u));
  }
  return out;
}

ParamMap precompose_circle(const ParamMap& m, int factor,
                           const Expression& rep) {
  if (factor < 0 || factor >= m.dim_in() || !m.domain[factor].is_circle())
    throw ValidationError("precompose_circle requires a circle factor");
  ParamMap out = m;
  for (auto& c : out.components) c = c.substitute(factor, rep);
  check_periodicity(out);
  return out;
}

Vec random_unit_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
  } while (v.norm() < 1e-6);
  return v.normalized();
}

double min_image_distance(const MapFn& a, const MapFn& b, int samples) {
  auto sample = [&](const MapFn& f) {
    const int k = f.dim_in();
    std::int64_t total = 1;
    for (int j = 0; j < k; ++j) total *= samples;
    std::vector<Vec> pts;
    pts.reserve((std::size_t)total);
    for (std::int64_t idx = 0; idx < total; ++idx) {
      std::int64_t x = idx;
      Vec u(k);
      for (int j = 0; j < k; ++j) {
        const auto& d = f.domain()[j];
        u[j] = d.lower() + (x % samples) * d.width() / samples;
        x /= samples;
      }
      pts.push_back(f.eval(u));
    }
    return pts;
  };
  auto pa = sample(a), pb = sample(b);
  double best = std::numeric_limits<double>::max();
  for (const auto& x : pa)
    for (const auto& y : pb) best = std::min(best, (x - y).norm());
  return best;
}

}  // namespace linkeng
