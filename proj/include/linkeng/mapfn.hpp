#pragma once

#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "linkeng/expr.hpp"

namespace linkeng {

// A differentiable map from a product of circles/intervals to R^m.
// Backed either by a ParamMap AST or by an arbitrary generic callable
// written against the scalar types {double, Dual}; the Jacobian always
// comes from dual-number propagation.
class MapFn {
 public:
  MapFn() = default;

  template <typename F>
  MapFn(std::vector<DomainFactor> dom, int dim_out, F f)
      : domain_(std::move(dom)),
        dim_out_(dim_out),
        eval_d_([f](std::span<const double> u, std::span<double> out) {
          f(u, out);
        }),
        eval_j_([f](std::span<const Dual> u, std::span<Dual> out) {
          f(u, out);
        }) {}

  explicit MapFn(const ParamMap& m)
      : MapFn(m.domain, m.dim_out,
              [pm = std::make_shared<ParamMap>(m)](auto u, auto out) {
                pm->eval_generic(u, out);
              }) {}

  const std::vector<DomainFactor>& domain() const { return domain_; }
  int dim_in() const { return (int)domain_.size(); }
  int dim_out() const { return dim_out_; }
  bool valid() const { return (bool)eval_d_; }

  Vec eval(const Vec& u) const {
    Vec w = wrap_point(domain_, u);
    Vec out(dim_out_);
    eval_d_(std::span<const double>(w.data(), (std::size_t)w.size()),
            std::span<double>(out.data(), (std::size_t)out.size()));
    return out;
  }

  // value and Jacobian in one pass
  void jet(const Vec& u, Vec& out, Mat& J) const {
    const int k = dim_in();
    Vec w = wrap_point(domain_, u);
    thread_local std::vector<Dual> in, res;
    in.resize(k);
    res.resize(dim_out_);
    for (int i = 0; i < k; ++i) in[i] = Dual(w[i], k, i);
    eval_j_(std::span<const Dual>(in), std::span<Dual>(res));
    out.resize(dim_out_);
    J.resize(dim_out_, k);
    for (int r = 0; r < dim_out_; ++r) {
      out[r] = res[r].v;
      for (int c = 0; c < k; ++c) J(r, c) = res[r].d[c];
    }
  }

  Mat jacobian(const Vec& u) const {
    Vec out;
    Mat J;
    jet(u, out, J);
    return J;
  }

  // raw generic invocation (no wrapping); used by combinators
  template <typename T>
  void call(std::span<const T> u, std::span<T> out) const {
    if constexpr (std::is_same_v<T, double>)
      eval_d_(u, out);
    else
      eval_j_(u, out);
  }

 private:
  std::vector<DomainFactor> domain_;
  int dim_out_ = 0;
  std::function<void(std::span<const double>, std::span<double>)> eval_d_;
  std::function<void(std::span<const Dual>, std::span<Dual>)> eval_j_;
};

inline std::vector<DomainFactor> concat_domains(
    const std::vector<DomainFactor>& a, const std::vector<DomainFactor>& b) {
  std::vector<DomainFactor> d = a;
  d.insert(d.end(), b.begin(), b.end());
  return d;
}

// (x, y) |-> f(x) - g(y); f and g must share a target dimension
inline MapFn pair_difference(const MapFn& f, const MapFn& g) {
  auto fp = std::make_shared<MapFn>(f);
  auto gp = std::make_shared<MapFn>(g);
  const int ka = f.dim_in(), n = f.dim_out();
  return MapFn(
      concat_domains(f.domain(), g.domain()), n,
      [fp, gp, ka, n]<typename T>(std::span<const T> u, std::span<T> out) {
        std::vector<T> tmp(n);
        // raw generic call through the stored closures
        fp->call(u.subspan(0, ka), out);
        gp->call(u.subspan(ka), std::span<T>(tmp));
        for (int i = 0; i < n; ++i) out[i] = out[i] - tmp[i];
      });
}

// halves of a map into R^{2n}: p1 - p2
inline MapFn diagonal_gap(const MapFn& H) {
  auto hp = std::make_shared<MapFn>(H);
  const int n = H.dim_out() / 2;
  return MapFn(H.domain(), n,
               [hp, n]<typename T>(std::span<const T> u, std::span<T> out) {
                 std::vector<T> tmp(2 * n);
                 hp->call(u, std::span<T>(tmp));
                 for (int i = 0; i < n; ++i) out[i] = tmp[i] - tmp[n + i];
               });
}

// fix one input coordinate to a constant, removing that factor
inline MapFn fix_coord(const MapFn& f, int index, double value) {
  auto fp = std::make_shared<MapFn>(f);
  std::vector<DomainFactor> dom = f.domain();
  dom.erase(dom.begin() + index);
  const int k = f.dim_in();
  return MapFn(std::move(dom), f.dim_out(),
               [fp, index, k, value]<typename T>(std::span<const T> u,
                                                 std::span<T> out) {
                 std::vector<T> full(k);
                 for (int i = 0, j = 0; i < k; ++i)
                   full[i] = (i == index) ? T(value) : u[j++];
                 fp->call(std::span<const T>(full), out);
               });
}

// reorder input factors: new input i feeds old input perm[i]
inline MapFn permute_inputs(const MapFn& f, const std::vector<int>& perm) {
  auto fp = std::make_shared<MapFn>(f);
  std::vector<DomainFactor> dom(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) dom[i] = f.domain()[perm[i]];
  const int k = f.dim_in();
  return MapFn(std::move(dom), f.dim_out(),
               [fp, perm, k]<typename T>(std::span<const T> u,
                                         std::span<T> out) {
                 std::vector<T> full(k);
                 for (int i = 0; i < k; ++i) full[perm[i]] = u[i];
                 fp->call(std::span<const T>(full), out);
               });
}

// swap the two R^n blocks of a map into R^{2n}
inline MapFn swap_halves(const MapFn& H) {
  auto hp = std::make_shared<MapFn>(H);
  const int n = H.dim_out() / 2;
  return MapFn(H.domain(), H.dim_out(),
               [hp, n]<typename T>(std::span<const T> u, std::span<T> out) {
                 std::vector<T> tmp(2 * n);
                 hp->call(u, std::span<T>(tmp));
                 for (int i = 0; i < n; ++i) {
                   out[i] = tmp[n + i];
                   out[n + i] = tmp[i];
                 }
               });
}

}  // namespace linkeng
