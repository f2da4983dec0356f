#pragma once

#include <array>
#include <cmath>

#include "linkeng/errors.hpp"

namespace linkeng {

// Forward-mode dual number carrying up to kMaxVars partial derivatives.
// Systems in this codebase are small (k <= 8), so partials live inline.
struct Dual {
  static constexpr int kMaxVars = 8;

  double v = 0.0;
  int n = 0;  // number of active partials
  std::array<double, kMaxVars> d{};

  Dual() = default;
  Dual(double value) : v(value) {}
  Dual(double value, int nvars, int seed_index) : v(value), n(nvars) {
    d.fill(0.0);
    d[seed_index] = 1.0;
  }

  static Dual constant(double value, int nvars) {
    Dual x(value);
    x.n = nvars;
    return x;
  }
};

inline Dual operator+(const Dual& a, const Dual& b) {
  Dual r(a.v + b.v);
  r.n = a.n > b.n ? a.n : b.n;
  for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}

inline Dual operator-(const Dual& a, const Dual& b) {
  Dual r(a.v - b.v);
  r.n = a.n > b.n ? a.n : b.n;
  for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}

inline Dual operator-(const Dual& a) {
  Dual r(-a.v);
  r.n = a.n;
  for (int i = 0; i < r.n; ++i) r.d[i] = -a.d[i];
  return r;
}

inline Dual operator*(const Dual& a, const Dual& b) {
  Dual r(a.v * b.v);
  r.n = a.n > b.n ? a.n : b.n;
  for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}

inline Dual operator/(const Dual& a, const Dual& b) {
  if (b.v == 0.0) throw DomainError("division by zero");
  Dual r(a.v / b.v);
  r.n = a.n > b.n ? a.n : b.n;
  const double ib = 1.0 / b.v;
  for (int i = 0; i < r.n; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) * ib;
  return r;
}

inline Dual sin(const Dual& a) {
  Dual r(std::sin(a.v));
  r.n = a.n;
  const double c = std::cos(a.v);
  for (int i = 0; i < r.n; ++i) r.d[i] = c * a.d[i];
  return r;
}

inline Dual cos(const Dual& a) {
  Dual r(std::cos(a.v));
  r.n = a.n;
  const double s = -std::sin(a.v);
  for (int i = 0; i < r.n; ++i) r.d[i] = s * a.d[i];
  return r;
}

inline Dual exp(const Dual& a) {
  Dual r(std::exp(a.v));
  r.n = a.n;
  for (int i = 0; i < r.n; ++i) r.d[i] = r.v * a.d[i];
  return r;
}

inline Dual sqrt(const Dual& a) {
  if (a.v < 0.0) throw DomainError("sqrt of negative value");
  Dual r(std::sqrt(a.v));
  r.n = a.n;
  if (r.n > 0) {
    if (r.v == 0.0) throw DomainError("sqrt derivative at zero");
    const double s = 0.5 / r.v;
    for (int i = 0; i < r.n; ++i) r.d[i] = s * a.d[i];
  }
  return r;
}

// integer power by repeated squaring; exponent may be negative
inline Dual pow_int(const Dual& a, int e) {
  if (e == 0) return Dual::constant(1.0, a.n);
  bool inv = e < 0;
  unsigned long k = inv ? -(long)e : (long)e;
  Dual base = a;
  Dual r = Dual::constant(1.0, a.n);
  while (k) {
    if (k & 1) r = r * base;
    base = base * base;
    k >>= 1;
  }
  if (inv) return Dual::constant(1.0, a.n) / r;
  return r;
}

// double overloads so evaluation code can be written generically over the
// scalar type
inline double pow_int(double a, int e) {
  if (e == 0) return 1.0;
  bool inv = e < 0;
  unsigned long k = inv ? -(long)e : (long)e;
  double base = a, r = 1.0;
  while (k) {
    if (k & 1) r *= base;
    base *= base;
    k >>= 1;
  }
  return inv ? 1.0 / r : r;
}

inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double exp(double x) { return std::exp(x); }
inline double sqrt(double x) {
  if (x < 0.0) throw DomainError("sqrt of negative value");
  return std::sqrt(x);
}

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

}  // namespace linkeng
