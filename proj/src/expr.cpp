#include "linkeng/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace linkeng {

double DomainFactor::wrap(double x) const {
  if (kind != Kind::Circle) return x;
  double y = std::fmod(x, period);
  if (y < 0) y += period;
  if (y >= period) y = 0.0;  // fmod rounding at the seam
  return y;
}

Vec wrap_point(const std::vector<DomainFactor>& dom, Vec u) {
  for (int i = 0; i < (int)dom.size(); ++i) u[i] = dom[i].wrap(u[i]);
  return u;
}

double domain_distance(const std::vector<DomainFactor>& dom, const Vec& a,
                       const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < (int)dom.size(); ++i) {
    double d = a[i] - b[i];
    if (dom[i].is_circle()) {
      const double p = dom[i].period;
      d = std::fmod(d, p);
      if (d > 0.5 * p) d -= p;
      if (d < -0.5 * p) d += p;
    }
    s += d * d;
  }
  return std::sqrt(s);
}

int Expression::add(Node n) {
  auto is_const = [&](int i) { return nodes[i].op == Const; };
  bool foldable = false;
  switch (n.op) {
    case Const:
    case Var:
      break;
    case Add:
    case Sub:
    case Mul:
    case Div:
      foldable = is_const(n.a) && is_const(n.b);
      break;
    default:
      foldable = is_const(n.a);
      break;
  }
  if (foldable) {
    const double x = nodes[n.a].cval;
    const double y = n.b >= 0 ? nodes[n.b].cval : 0.0;
    double v = 0.0;
    switch (n.op) {
      case Add: v = x + y; break;
      case Sub: v = x - y; break;
      case Mul: v = x * y; break;
      case Div:
        if (y == 0.0) throw DomainError("division by zero in constant expression");
        v = x / y;
        break;
      case Pow: v = pow_int(x, n.ipow); break;
      case Neg: v = -x; break;
      case Sin: v = std::sin(x); break;
      case Cos: v = std::cos(x); break;
      case Exp: v = std::exp(x); break;
      case Sqrt:
        if (x < 0.0) throw DomainError("sqrt of negative constant");
        v = std::sqrt(x);
        break;
      default: break;
    }
    n = Node{Const, -1, -1, v, -1, 0};
  }
  // identity simplifications so folded constants do not clutter the tree
  if (n.op != Const) {
    auto cval_is = [&](int i, double c) {
      return i >= 0 && is_const(i) && nodes[i].cval == c;
    };
    switch (n.op) {
      case Add:
        if (cval_is(n.a, 0.0)) return n.b;
        if (cval_is(n.b, 0.0)) return n.a;
        break;
      case Sub:
        if (cval_is(n.b, 0.0)) return n.a;
        break;
      case Mul:
        if (cval_is(n.a, 1.0)) return n.b;
        if (cval_is(n.b, 1.0)) return n.a;
        if (cval_is(n.a, 0.0)) return n.a;
        if (cval_is(n.b, 0.0)) return n.b;
        break;
      case Div:
        if (cval_is(n.b, 1.0)) return n.a;
        break;
      case Pow:
        if (n.ipow == 1) return n.a;
        if (n.ipow == 0) n = Node{Const, -1, -1, 1.0, -1, 0};
        break;
      default:
        break;
    }
  }
  nodes.push_back(n);
  return (int)nodes.size() - 1;
}

Expression Expression::constant(double c) {
  Expression e;
  e.root = e.add(Node{Const, -1, -1, c, -1, 0});
  return e;
}

Expression Expression::variable(int var) {
  Expression e;
  e.root = e.add(Node{Var, -1, -1, 0.0, var, 0});
  return e;
}

namespace {
// deep-copy node i of src into dst, returning new index
int copy_into(const Expression& src, int i, Expression& dst) {
  const Expression::Node& n = src.nodes[i];
  Expression::Node m = n;
  if (n.a >= 0) m.a = copy_into(src, n.a, dst);
  if (n.b >= 0) m.b = copy_into(src, n.b, dst);
  return dst.add(m);
}

int subst_rec(const Expression& src, int i, int var, const Expression& sub,
              Expression& dst) {
  const Expression::Node& n = src.nodes[i];
  if (n.op == Expression::Var && n.var == var)
    return copy_into(sub, sub.root, dst);
  Expression::Node m = n;
  if (n.a >= 0) m.a = subst_rec(src, n.a, var, sub, dst);
  if (n.b >= 0) m.b = subst_rec(src, n.b, var, sub, dst);
  return dst.add(m);
}
}  // namespace

Expression Expression::substitute(int var, const Expression& sub) const {
  Expression out;
  out.root = subst_rec(*this, root, var, sub, out);
  return out;
}

Expression Expression::remap(const std::vector<int>& new_index) const {
  Expression out = *this;
  for (auto& n : out.nodes)
    if (n.op == Var) n.var = new_index[n.var];
  return out;
}

namespace {
int precedence(Expression::Op op) {
  switch (op) {
    case Expression::Add:
    case Expression::Sub: return 1;
    case Expression::Mul:
    case Expression::Div: return 2;
    case Expression::Neg: return 3;
    case Expression::Pow: return 4;
    default: return 5;
  }
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // try shorter representations that still round-trip
  for (int prec = 1; prec < 17; ++prec) {
    char b2[40];
    std::snprintf(b2, sizeof b2, "%.*g", prec, v);
    if (std::strtod(b2, nullptr) == v) return b2;
  }
  return buf;
}

void print_rec(const Expression& e, int i,
               const std::vector<std::string>& names, std::string& out) {
  const Expression::Node& n = e.nodes[i];
  auto child = [&](int c, bool parens) {
    if (parens) out += '(';
    print_rec(e, c, names, out);
    if (parens) out += ')';
  };
  const int p = precedence(n.op);
  switch (n.op) {
    case Expression::Const: {
      if (n.cval < 0) {
        out += "(";
        out += fmt_double(n.cval);
        out += ")";
      } else {
        out += fmt_double(n.cval);
      }
      break;
    }
    case Expression::Var:
      out += names[n.var];
      break;
    case Expression::Add:
      child(n.a, precedence(e.nodes[n.a].op) < p);
      out += " + ";
      child(n.b, precedence(e.nodes[n.b].op) < p);
      break;
    case Expression::Sub:
      child(n.a, precedence(e.nodes[n.a].op) < p);
      out += " - ";
      child(n.b, precedence(e.nodes[n.b].op) <= p);
      break;
    case Expression::Mul:
      child(n.a, precedence(e.nodes[n.a].op) < p);
      out += "*";
      child(n.b, precedence(e.nodes[n.b].op) < p);
      break;
    case Expression::Div:
      child(n.a, precedence(e.nodes[n.a].op) < p);
      out += "/";
      child(n.b, precedence(e.nodes[n.b].op) <= p);
      break;
    case Expression::Pow:
      child(n.a, precedence(e.nodes[n.a].op) <= p);
      out += "^";
      if (n.ipow < 0) {
        out += "(";
        out += std::to_string(n.ipow);
        out += ")";
      } else {
        out += std::to_string(n.ipow);
      }
      break;
    case Expression::Neg:
      out += "-";
      child(n.a, precedence(e.nodes[n.a].op) < p);
      break;
    case Expression::Sin:
      out += "sin(";
      print_rec(e, n.a, names, out);
      out += ")";
      break;
    case Expression::Cos:
      out += "cos(";
      print_rec(e, n.a, names, out);
      out += ")";
      break;
    case Expression::Exp:
      out += "exp(";
      print_rec(e, n.a, names, out);
      out += ")";
      break;
    case Expression::Sqrt:
      out += "sqrt(";
      print_rec(e, n.a, names, out);
      out += ")";
      break;
  }
}

bool same_rec(const Expression& x, int i, const Expression& y, int j) {
  const auto& a = x.nodes[i];
  const auto& b = y.nodes[j];
  if (a.op != b.op) return false;
  switch (a.op) {
    case Expression::Const: return a.cval == b.cval;
    case Expression::Var: return a.var == b.var;
    case Expression::Pow:
      return a.ipow == b.ipow && same_rec(x, a.a, y, b.a);
    default: break;
  }
  if ((a.a >= 0) != (b.a >= 0) || (a.b >= 0) != (b.b >= 0)) return false;
  if (a.a >= 0 && !same_rec(x, a.a, y, b.a)) return false;
  if (a.b >= 0 && !same_rec(x, a.b, y, b.b)) return false;
  return true;
}
}  // namespace

std::string Expression::print(const std::vector<std::string>& names) const {
  std::string out;
  print_rec(*this, root, names, out);
  return out;
}

bool Expression::same_as(const Expression& other) const {
  return same_rec(*this, root, other, other.root);
}

Vec ParamMap::eval(const Vec& u) const {
  Vec w = wrap_point(domain, u);
  Vec out(dim_out);
  eval_generic(std::span<const double>(w.data(), w.size()),
               std::span<double>(out.data(), out.size()));
  return out;
}

Mat ParamMap::jacobian(const Vec& u) const {
  const int k = dim_in();
  Vec w = wrap_point(domain, u);
  std::vector<Dual> in(k);
  for (int i = 0; i < k; ++i) in[i] = Dual(w[i], k, i);
  std::vector<Dual> out(dim_out);
  eval_generic(std::span<const Dual>(in), std::span<Dual>(out));
  Mat J(dim_out, k);
  for (int r = 0; r < dim_out; ++r)
    for (int c = 0; c < k; ++c) J(r, c) = out[r].d[c];
  return J;
}

std::vector<std::string> ParamMap::param_names() const {
  std::vector<std::string> names;
  names.reserve(domain.size());
  for (const auto& f : domain) names.push_back(f.name);
  return names;
}

std::string ParamMap::print() const {
  std::string out = name + "(";
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (i) out += ", ";
    out += domain[i].name + ": ";
    if (domain[i].is_circle()) {
      out += "circle";
    } else {
      out += "interval " + fmt_double(domain[i].lo) + " " +
             fmt_double(domain[i].hi);
    }
  }
  out += ") -> " + std::to_string(dim_out) + " = (";
  const auto names = param_names();
  for (int i = 0; i < dim_out; ++i) {
    if (i) out += ", ";
    out += components[i].print(names);
  }
  out += ")";
  return out;
}

// ---------------------------------------------------------------------------
// recursive-descent parser

namespace {

struct Token {
  enum Kind {
    End,
    Number,
    Ident,
    LParen,
    RParen,
    Comma,
    Colon,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Equals
  };
  Kind kind = End;
  std::size_t pos = 0;
  double num = 0.0;
  std::string text;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }
  std::size_t pos() const { return tok_.pos; }

 private:
  void advance() {
    while (i_ < s_.size() && std::isspace((unsigned char)s_[i_])) ++i_;
    tok_ = Token{};
    tok_.pos = i_;
    if (i_ >= s_.size()) {
      tok_.kind = Token::End;
      return;
    }
    const char c = s_[i_];
    if (std::isdigit((unsigned char)c) ||
        (c == '.' && i_ + 1 < s_.size() &&
         std::isdigit((unsigned char)s_[i_ + 1]))) {
      std::size_t j = i_;
      while (j < s_.size() && (std::isdigit((unsigned char)s_[j]) ||
                               s_[j] == '.' || s_[j] == 'e' || s_[j] == 'E' ||
                               ((s_[j] == '+' || s_[j] == '-') && j > i_ &&
                                (s_[j - 1] == 'e' || s_[j - 1] == 'E'))))
        ++j;
      std::string buf(s_.substr(i_, j - i_));
      std::size_t used = 0;
      try {
        tok_.num = std::stod(buf, &used);
      } catch (const std::exception&) {
        throw SyntaxError(i_, "number", "malformed numeric literal");
      }
      tok_.kind = Token::Number;
      tok_.text = buf.substr(0, used);
      i_ += used;
      return;
    }
    if (std::isalpha((unsigned char)c) || c == '_') {
      std::size_t j = i_;
      while (j < s_.size() &&
             (std::isalnum((unsigned char)s_[j]) || s_[j] == '_'))
        ++j;
      tok_.kind = Token::Ident;
      tok_.text = std::string(s_.substr(i_, j - i_));
      i_ = j;
      return;
    }
    if (c == '-' && i_ + 1 < s_.size() && s_[i_ + 1] == '>') {
      tok_.kind = Token::Arrow;
      i_ += 2;
      return;
    }
    switch (c) {
      case '(': tok_.kind = Token::LParen; break;
      case ')': tok_.kind = Token::RParen; break;
      case ',': tok_.kind = Token::Comma; break;
      case ':': tok_.kind = Token::Colon; break;
      case '+': tok_.kind = Token::Plus; break;
      case '-': tok_.kind = Token::Minus; break;
      case '*': tok_.kind = Token::Star; break;
      case '/': tok_.kind = Token::Slash; break;
      case '^': tok_.kind = Token::Caret; break;
      case '=': tok_.kind = Token::Equals; break;
      default:
        throw SyntaxError(i_, "token",
                          "unexpected character '" + std::string(1, c) +
                              "' at byte " + std::to_string(i_));
    }
    ++i_;
  }

  std::string_view s_;
  std::size_t i_ = 0;
  Token tok_;
};

class ExprParser {
 public:
  ExprParser(Lexer& lex, const std::vector<std::string>& params,
             Expression& out)
      : lex_(lex), params_(params), out_(out) {}

  int parse() { return parse_sum(); }

 private:
  [[noreturn]] void fail(const std::string& expected) {
    throw SyntaxError(lex_.pos(), expected,
                      "syntax error at byte " + std::to_string(lex_.pos()) +
                          ": expected " + expected);
  }

  int parse_sum() {
    int lhs = parse_term();
    for (;;) {
      const auto k = lex_.peek().kind;
      if (k == Token::Plus || k == Token::Minus) {
        lex_.take();
        int rhs = parse_term();
        lhs = out_.add({k == Token::Plus ? Expression::Add : Expression::Sub,
                        lhs, rhs, 0.0, -1, 0});
      } else {
        return lhs;
      }
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      const auto k = lex_.peek().kind;
      if (k == Token::Star || k == Token::Slash) {
        lex_.take();
        int rhs = parse_unary();
        lhs = out_.add({k == Token::Star ? Expression::Mul : Expression::Div,
                        lhs, rhs, 0.0, -1, 0});
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    if (lex_.peek().kind == Token::Minus) {
      lex_.take();
      int a = parse_unary();
      return out_.add({Expression::Neg, a, -1, 0.0, -1, 0});
    }
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    if (lex_.peek().kind == Token::Caret) {
      lex_.take();
      int sign = 1;
      if (lex_.peek().kind == Token::Minus) {
        lex_.take();
        sign = -1;
      }
      bool parens = false;
      if (lex_.peek().kind == Token::LParen) {
        lex_.take();
        parens = true;
        if (lex_.peek().kind == Token::Minus) {
          lex_.take();
          sign = -sign;
        }
      }
      if (lex_.peek().kind != Token::Number) fail("integer exponent");
      Token t = lex_.take();
      double e = t.num;
      if (e != std::floor(e) || t.text.find('.') != std::string::npos)
        throw SyntaxError(t.pos, "integer exponent",
                          "power requires an integer exponent at byte " +
                              std::to_string(t.pos));
      if (parens) {
        if (lex_.peek().kind != Token::RParen) fail("')'");
        lex_.take();
      }
      return out_.add(
          {Expression::Pow, base, -1, 0.0, -1, sign * (int)e});
    }
    return base;
  }

  int parse_primary() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Token::Number: {
        Token tt = lex_.take();
        return out_.add({Expression::Const, -1, -1, tt.num, -1, 0});
      }
      case Token::LParen: {
        lex_.take();
        int e = parse_sum();
        if (lex_.peek().kind != Token::RParen) fail("')'");
        lex_.take();
        return e;
      }
      case Token::Ident: {
        Token tt = lex_.take();
        if (tt.text == "pi")
          return out_.add({Expression::Const, -1, -1, kPi, -1, 0});
        Expression::Op fn;
        bool is_fn = true;
        if (tt.text == "sin") fn = Expression::Sin;
        else if (tt.text == "cos") fn = Expression::Cos;
        else if (tt.text == "exp") fn = Expression::Exp;
        else if (tt.text == "sqrt") fn = Expression::Sqrt;
        else is_fn = false;
        if (is_fn) {
          // either sin(expr) or the tight juxtaposed form sin x
          if (lex_.peek().kind == Token::LParen) {
            lex_.take();
            int a = parse_sum();
            if (lex_.peek().kind != Token::RParen) fail("')'");
            lex_.take();
            return out_.add({fn, a, -1, 0.0, -1, 0});
          }
          int a = parse_unary();
          return out_.add({fn, a, -1, 0.0, -1, 0});
        }
        for (int i = 0; i < (int)params_.size(); ++i)
          if (params_[i] == tt.text)
            return out_.add({Expression::Var, -1, -1, 0.0, i, 0});
        throw UnknownIdentifier("unknown identifier '" + tt.text +
                                "' at byte " + std::to_string(tt.pos));
      }
      default:
        fail("number, identifier, or '('");
    }
  }

  Lexer& lex_;
  const std::vector<std::string>& params_;
  Expression& out_;
};

}  // namespace

void check_periodicity(const ParamMap& m) {
  // 16 samples per circle factor; other coordinates from a fixed LCG
  constexpr int kSamples = 16;
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  auto next01 = [&]() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return (double)(state >> 11) / 9007199254740992.0;
  };
  const int k = m.dim_in();
  std::vector<double> u(k), v(k), fa(m.dim_out), fb(m.dim_out);
  for (int f = 0; f < k; ++f) {
    if (!m.domain[f].is_circle()) continue;
    for (int s = 0; s < kSamples; ++s) {
      for (int j = 0; j < k; ++j)
        u[j] = m.domain[j].lower() + next01() * m.domain[j].width();
      u[f] = m.domain[f].period * s / kSamples;
      v = u;
      v[f] += m.domain[f].period;
      // raw, unwrapped evaluation on purpose
      m.eval_generic(std::span<const double>(u), std::span<double>(fa));
      m.eval_generic(std::span<const double>(v), std::span<double>(fb));
      double scale = 1.0, diff = 0.0;
      for (int c = 0; c < m.dim_out; ++c) {
        scale = std::max(scale, std::abs(fa[c]));
        diff = std::max(diff, std::abs(fa[c] - fb[c]));
      }
      if (diff > 1e-9 * scale)
        throw PeriodicityViolation(
            "map '" + m.name + "': component is not periodic in circle factor '" +
            m.domain[f].name + "' (sampled deviation " + std::to_string(diff) +
            ")");
    }
  }
}

Expression parse_expression(std::string_view text,
                            const std::vector<std::string>& params) {
  Lexer lex(text);
  Expression e;
  ExprParser p(lex, params, e);
  e.root = p.parse();
  if (lex.peek().kind != Token::End)
    throw SyntaxError(lex.pos(), "end of expression",
                      "trailing input at byte " + std::to_string(lex.pos()));
  return e;
}

ParamMap parse_map(std::string_view text) {
  Lexer lex(text);
  auto expect = [&](Token::Kind k, const char* what) {
    if (lex.peek().kind != k)
      throw SyntaxError(lex.pos(), what,
                        "syntax error at byte " + std::to_string(lex.pos()) +
                            ": expected " + what);
    return lex.take();
  };

  ParamMap m;
  m.name = expect(Token::Ident, "map name").text;
  expect(Token::LParen, "'('");
  for (;;) {
    DomainFactor f;
    f.name = expect(Token::Ident, "parameter name").text;
    if (f.name == "pi")
      throw SyntaxError(lex.pos(), "parameter name",
                        "'pi' is reserved and cannot name a parameter");
    expect(Token::Colon, "':'");
    Token kind = expect(Token::Ident, "'circle' or 'interval'");
    if (kind.text == "circle") {
      f.kind = DomainFactor::Kind::Circle;
      f.period = kTwoPi;
    } else if (kind.text == "interval") {
      f.kind = DomainFactor::Kind::Interval;
      auto num = [&]() {
        double sign = 1.0;
        if (lex.peek().kind == Token::Minus) {
          lex.take();
          sign = -1.0;
        }
        return sign * expect(Token::Number, "interval bound").num;
      };
      f.lo = num();
      f.hi = num();
      if (!(f.lo < f.hi))
        throw ValidationError("interval bounds must satisfy lo < hi for '" +
                              f.name + "'");
    } else {
      throw SyntaxError(kind.pos, "'circle' or 'interval'",
                        "unknown domain kind '" + kind.text + "' at byte " +
                            std::to_string(kind.pos));
    }
    for (const auto& g : m.domain)
      if (g.name == f.name)
        throw ValidationError("duplicate parameter name '" + f.name + "'");
    m.domain.push_back(std::move(f));
    if (lex.peek().kind == Token::Comma) {
      lex.take();
      continue;
    }
    break;
  }
  expect(Token::RParen, "')'");
  if ((int)m.domain.size() > Dual::kMaxVars)
    throw ValidationError("too many parameters (max " +
                          std::to_string(Dual::kMaxVars) + ")");
  expect(Token::Arrow, "'->'");
  Token nt = expect(Token::Number, "target dimension");
  if (nt.num != std::floor(nt.num) || nt.num < 1)
    throw ValidationError("target dimension must be a positive integer");
  m.dim_out = (int)nt.num;
  expect(Token::Equals, "'='");
  expect(Token::LParen, "'('");
  const auto names = m.param_names();
  for (int i = 0; i < m.dim_out; ++i) {
    Expression e;
    ExprParser p(lex, names, e);
    e.root = p.parse();
    m.components.push_back(std::move(e));
    if (i + 1 < m.dim_out) expect(Token::Comma, "','");
  }
  expect(Token::RParen, "')'");
  if (lex.peek().kind != Token::End)
    throw SyntaxError(lex.pos(), "end of definition",
                      "trailing input at byte " + std::to_string(lex.pos()));

  check_periodicity(m);
  return m;
}

}  // namespace linkeng
