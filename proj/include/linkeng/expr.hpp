#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "linkeng/dual.hpp"
#include "linkeng/errors.hpp"

namespace linkeng {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct DomainFactor {
  enum class Kind { Circle, Interval };
  Kind kind = Kind::Circle;
  std::string name;
  double lo = 0.0, hi = 0.0;   // interval bounds
  double period = kTwoPi;      // circle period

  double width() const { return kind == Kind::Circle ? period : hi - lo; }
  double lower() const { return kind == Kind::Circle ? 0.0 : lo; }
  double upper() const { return kind == Kind::Circle ? period : hi; }
  // wrap a circle coordinate into [0, period); intervals pass through
  double wrap(double x) const;
  bool is_circle() const { return kind == Kind::Circle; }
};

// periodic-aware distance between two points of a common domain
double domain_distance(const std::vector<DomainFactor>& dom, const Vec& a,
                       const Vec& b);
Vec wrap_point(const std::vector<DomainFactor>& dom, Vec u);

// Expression tree stored as a flat node pool; children always precede
// parents, so evaluation is a single forward sweep.
class Expression {
 public:
  enum Op : std::uint8_t {
    Const,
    Var,
    Add,
    Sub,
    Mul,
    Div,
    Pow,  // integer exponent in ipow
    Neg,
    Sin,
    Cos,
    Exp,
    Sqrt
  };
  struct Node {
    Op op;
    int a = -1, b = -1;
    double cval = 0.0;
    int var = -1;
    int ipow = 0;
  };

  std::vector<Node> nodes;
  int root = -1;

  int add(Node n);  // folds constants

  template <typename T>
  T eval(std::span<const T> vars) const {
    thread_local std::vector<T> scratch;
    scratch.assign(nodes.size(), T{});
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Node& nd = nodes[i];
      switch (nd.op) {
        case Const:
          scratch[i] = T(nd.cval);
          break;
        case Var:
          scratch[i] = vars[nd.var];
          break;
        case Add:
          scratch[i] = scratch[nd.a] + scratch[nd.b];
          break;
        case Sub:
          scratch[i] = scratch[nd.a] - scratch[nd.b];
          break;
        case Mul:
          scratch[i] = scratch[nd.a] * scratch[nd.b];
          break;
        case Div:
          if (value_of(scratch[nd.b]) == 0.0)
            throw DomainError("division by zero");
          scratch[i] = scratch[nd.a] / scratch[nd.b];
          break;
        case Pow:
          scratch[i] = pow_int(scratch[nd.a], nd.ipow);
          break;
        case Neg:
          scratch[i] = -scratch[nd.a];
          break;
        case Sin:
          scratch[i] = sin(scratch[nd.a]);
          break;
        case Cos:
          scratch[i] = cos(scratch[nd.a]);
          break;
        case Exp:
          scratch[i] = exp(scratch[nd.a]);
          break;
        case Sqrt:
          scratch[i] = sqrt(scratch[nd.a]);
          break;
      }
    }
    return scratch[root];
  }

  // replace every occurrence of variable `var` by `sub` (whose variable
  // indices refer to the same parameter list)
  Expression substitute(int var, const Expression& sub) const;
  // remap variable indices
  Expression remap(const std::vector<int>& new_index) const;

  std::string print(const std::vector<std::string>& names) const;
  bool same_as(const Expression& other) const;

  static Expression constant(double c);
  static Expression variable(int var);
};

class ParamMap {
 public:
  std::string name;
  std::vector<DomainFactor> domain;
  int dim_out = 0;
  std::vector<Expression> components;

  int dim_in() const { return (int)domain.size(); }

  template <typename T>
  void eval_generic(std::span<const T> u, std::span<T> out) const {
    for (int i = 0; i < dim_out; ++i) out[i] = components[i].eval(u);
  }

  Vec eval(const Vec& u) const;      // wraps circle coordinates first
  Mat jacobian(const Vec& u) const;  // dim_out x dim_in, exact via duals

  std::string print() const;  // canonical DSL text

  std::vector<std::string> param_names() const;
};

// Numeric check that every component is periodic in each circle factor
// (16 samples per factor, tolerance 1e-9 relative); throws
// PeriodicityViolation.
void check_periodicity(const ParamMap& m);

// Parse a single map definition in the DSL:
//   name(param: circle | interval a b, ...) -> n = (expr, ..., expr)
// Runs registration checks (declared variables, circle periodicity).
ParamMap parse_map(std::string_view text);

// Expression-only entry point; variables resolved against `params`.
Expression parse_expression(std::string_view text,
                            const std::vector<std::string>& params);

}  // namespace linkeng
