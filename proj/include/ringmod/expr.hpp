#pragma once

// Small expression language for radial profiles (variable r) and analytic maps
// (variable z): numbers, the constants pi and i, + - * / ^, unary minus, and the
// functions log, exp, atan. Expressions differentiate symbolically.

#include <cctype>
#include <cstdio>
#include <cmath>
#include <complex>
#include <memory>
#include <string>
#include <string_view>

#include "ringmod/errors.hpp"

namespace ringmod {

class expr {
 public:
  enum class op { number, imag_unit, variable, neg, add, sub, mul, div, pow, log, exp, atan };

  expr() : expr(number(0.0)) {}

  static expr number(double v) { return expr(std::make_shared<node>(node{op::number, v, nullptr, nullptr})); }
  static expr variable() { return expr(std::make_shared<node>(node{op::variable, 0.0, nullptr, nullptr})); }
  static expr imag_unit() { return expr(std::make_shared<node>(node{op::imag_unit, 0.0, nullptr, nullptr})); }

  /// Parse `text`; the single free variable is spelled `var` ("r" or "z").
  static expr parse(std::string_view text, char var = 'r') {
    parser p{text, 0, var};
    expr e = p.sum();
    p.skip();
    if (p.pos != text.size())
      throw rejection("expression: unexpected '" + std::string(text.substr(p.pos, 1)) + "' at position " +
                      std::to_string(p.pos) + " in \"" + std::string(text) + "\"");
    return e;
  }

  template <class T>
  T operator()(T x) const {
    return eval<T>(*n_, x);
  }

  expr derivative() const { return diff(n_); }

  bool is_constant() const { return constant(*n_); }

  std::string str(char var = 'r') const { return print(*n_, var); }

  friend expr operator+(const expr& a, const expr& b) { return make(op::add, a, b); }
  friend expr operator-(const expr& a, const expr& b) { return make(op::sub, a, b); }
  friend expr operator*(const expr& a, const expr& b) { return make(op::mul, a, b); }
  friend expr operator/(const expr& a, const expr& b) { return make(op::div, a, b); }
  friend expr operator-(const expr& a) { return make(op::neg, a, {}); }

 private:
  struct node {
    op kind;
    double value;
    std::shared_ptr<const node> a, b;
  };
  using ptr = std::shared_ptr<const node>;

  explicit expr(ptr n) : n_(std::move(n)) {}

  static bool is_num(const ptr& p, double v) { return p->kind == op::number && p->value == v; }

  // Construction with light folding so derivatives stay readable.
  static expr make(op k, const expr& x, const expr& y) {
    const ptr& a = x.n_;
    const ptr& b = y.n_;
    const bool na = a->kind == op::number;
    const bool nb = b && b->kind == op::number;
    switch (k) {
      case op::neg:
        if (na) return number(-a->value);
        break;
      case op::add:
        if (is_num(a, 0)) return y;
        if (is_num(b, 0)) return x;
        if (na && nb) return number(a->value + b->value);
        break;
      case op::sub:
        if (is_num(b, 0)) return x;
        if (is_num(a, 0)) return make(op::neg, y, {});
        if (na && nb) return number(a->value - b->value);
        break;
      case op::mul:
        if (is_num(a, 0) || is_num(b, 0)) return number(0.0);
        if (is_num(a, 1)) return y;
        if (is_num(b, 1)) return x;
        if (na && nb) return number(a->value * b->value);
        break;
      case op::div:
        if (is_num(a, 0)) return number(0.0);
        if (is_num(b, 1)) return x;
        break;
      case op::pow:
        if (is_num(b, 0)) return number(1.0);
        if (is_num(b, 1)) return x;
        break;
      default:
        break;
    }
    return expr(std::make_shared<node>(node{k, 0.0, a, b}));
  }

  static bool constant(const node& n) {
    switch (n.kind) {
      case op::number:
      case op::imag_unit:
        return true;
      case op::variable:
        return false;
      default:
        return constant(*n.a) && (!n.b || constant(*n.b));
    }
  }

  template <class T>
  static T eval(const node& n, T x) {
    using std::atan, std::exp, std::log, std::pow;
    switch (n.kind) {
      case op::number: return T(n.value);
      case op::imag_unit:
        if constexpr (std::is_same_v<T, std::complex<double>>) return T(0.0, 1.0);
        else throw rejection("expression: the imaginary unit needs a complex variable");
      case op::variable: return x;
      case op::neg: return -eval(*n.a, x);
      case op::add: return eval(*n.a, x) + eval(*n.b, x);
      case op::sub: return eval(*n.a, x) - eval(*n.b, x);
      case op::mul: return eval(*n.a, x) * eval(*n.b, x);
      case op::div: return eval(*n.a, x) / eval(*n.b, x);
      case op::pow: {
        // Integer exponents by repeated multiplication: exact and defined for negative bases.
        if (n.b->kind == op::number && n.b->value == std::round(n.b->value) && std::abs(n.b->value) <= 64) {
          const int k = static_cast<int>(n.b->value);
          T base = eval(*n.a, x), acc = T(1.0);
          for (int i = 0; i < std::abs(k); ++i) acc *= base;
          return k < 0 ? T(1.0) / acc : acc;
        }
        return pow(eval(*n.a, x), eval(*n.b, x));
      }
      case op::log: return log(eval(*n.a, x));
      case op::exp: return exp(eval(*n.a, x));
      case op::atan: return atan(eval(*n.a, x));
    }
    return T(0.0);
  }

  static expr diff(const ptr& p) {
    const expr self(p);
    switch (p->kind) {
      case op::number:
      case op::imag_unit: return number(0.0);
      case op::variable: return number(1.0);
      default: break;
    }
    const expr a(p->a);
    const expr da = diff(p->a);
    switch (p->kind) {
      case op::neg: return -da;
      case op::add: return da + diff(p->b);
      case op::sub: return da - diff(p->b);
      case op::mul: {
        const expr b(p->b);
        return da * b + a * diff(p->b);
      }
      case op::div: {
        const expr b(p->b);
        return (da * b - a * diff(p->b)) / make(op::pow, b, number(2.0));
      }
      case op::pow: {
        const expr b(p->b);
        if (constant(*p->b)) return b * make(op::pow, a, b - number(1.0)) * da;
        // d(a^b) = a^b (b' log a + b a'/a)
        return self * (diff(p->b) * make(op::log, a, {}) + b * da / a);
      }
      case op::log: return da / a;
      case op::exp: return self * da;
      case op::atan: return da / (number(1.0) + make(op::pow, a, number(2.0)));
      default: return number(0.0);
    }
  }

  static std::string print(const node& n, char var) {
    auto bin = [&](const char* o) { return "(" + print(*n.a, var) + o + print(*n.b, var) + ")"; };
    switch (n.kind) {
      case op::number: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", n.value);
        return buf;
      }
      case op::imag_unit: return "i";
      case op::variable: return std::string(1, var);
      case op::neg: return "(-" + print(*n.a, var) + ")";
      case op::add: return bin("+");
      case op::sub: return bin("-");
      case op::mul: return bin("*");
      case op::div: return bin("/");
      case op::pow: return bin("^");
      case op::log: return "log(" + print(*n.a, var) + ")";
      case op::exp: return "exp(" + print(*n.a, var) + ")";
      case op::atan: return "atan(" + print(*n.a, var) + ")";
    }
    return "?";
  }

  struct parser {
    std::string_view s;
    std::size_t pos;
    char var;

    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
      skip();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    [[noreturn]] void fail(const std::string& what) {
      throw rejection("expression: " + what + " at position " + std::to_string(pos) + " in \"" + std::string(s) + "\"");
    }

    expr sum() {
      expr e = product();
      while (true) {
        if (eat('+')) e = e + product();
        else if (eat('-')) e = e - product();
        else return e;
      }
    }
    expr product() {
      expr e = unary();
      while (true) {
        if (eat('*')) e = e * unary();
        else if (eat('/')) e = e / unary();
        else return e;
      }
    }
    expr unary() {
      if (eat('-')) return -unary();
      if (eat('+')) return unary();
      return power();
    }
    expr power() {
      expr base = atom();
      if (eat('^')) return make(op::pow, base, unary());  // right associative
      return base;
    }
    expr atom() {
      skip();
      if (pos >= s.size()) fail("unexpected end");
      if (eat('(')) {
        expr e = sum();
        if (!eat(')')) fail("expected ')'");
        return e;
      }
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t used = 0;
        const std::string rest(s.substr(pos));
        double v;
        try {
          v = std::stod(rest, &used);
        } catch (const std::exception&) {
          fail("malformed number");
        }
        pos += used;
        return number(v);
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t end = pos;
        while (end < s.size() && std::isalnum(static_cast<unsigned char>(s[end]))) ++end;
        const std::string name(s.substr(pos, end - pos));
        pos = end;
        if (name.size() == 1 && name[0] == var) return variable();
        if (name == "pi") return number(3.14159265358979323846);
        if (name == "i" && var == 'z') return imag_unit();
        op f;
        if (name == "log") f = op::log;
        else if (name == "exp") f = op::exp;
        else if (name == "atan") f = op::atan;
        else fail("unknown name '" + name + "'");
        if (!eat('(')) fail("expected '(' after " + name);
        expr arg = sum();
        if (!eat(')')) fail("expected ')'");
        return make(f, arg, {});
      }
      fail(std::string("unexpected '") + c + "'");
    }
  };

  ptr n_;
};

}  // namespace ringmod
