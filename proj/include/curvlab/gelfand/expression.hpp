#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "curvlab/error.hpp"

namespace curvlab {

/// Arithmetic expression in one variable `u`:
///   expr := term (('+' | '-') term)*
///   term := unary (('*' | '/') unary)*
///   unary := '-' unary | power
///   power := atom ('^' unary)?
///   atom := number | 'u' | '(' expr ')' | name '(' expr (',' expr)? ')'
/// with name in {exp, log, pow}. Evaluation carries the derivative along
/// (forward-mode), so f' is exact.
class Expression {
 public:
  struct Dual {
    double v = 0.0;
    double d = 0.0;
  };

  static Expression parse(const std::string& text) {
    Parser p{text, 0};
    Expression e;
    e.root_ = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("unexpected '" + std::string(1, text[p.pos]) + "'");
    e.text_ = text;
    return e;
  }

  double operator()(double u) const { return eval({u, 1.0}).v; }
  Dual eval(Dual u) const { return root_->eval(u); }
  double derivative(double u) const { return eval({u, 1.0}).d; }
  const std::string& text() const { return text_; }

 private:
  struct Node {
    virtual ~Node() = default;
    virtual Dual eval(Dual u) const = 0;
  };
  using Ptr = std::shared_ptr<const Node>;

  struct Num final : Node {
    double c;
    explicit Num(double c) : c(c) {}
    Dual eval(Dual) const override { return {c, 0.0}; }
  };
  struct Var final : Node {
    Dual eval(Dual u) const override { return u; }
  };
  struct Bin final : Node {
    char op;
    Ptr a, b;
    Bin(char op, Ptr a, Ptr b) : op(op), a(std::move(a)), b(std::move(b)) {}
    Dual eval(Dual u) const override {
      const Dual x = a->eval(u), y = b->eval(u);
      switch (op) {
        case '+': return {x.v + y.v, x.d + y.d};
        case '-': return {x.v - y.v, x.d - y.d};
        case '*': return {x.v * y.v, x.d * y.v + x.v * y.d};
        case '/': return {x.v / y.v, (x.d * y.v - x.v * y.d) / (y.v * y.v)};
        default: break;
      }
      // x^y
      const double p = std::pow(x.v, y.v);
      double d = 0.0;
      if (y.d == 0.0)
        d = y.v == 0.0 ? 0.0 : y.v * std::pow(x.v, y.v - 1.0) * x.d;
      else
        d = p * (y.d * std::log(x.v) + y.v * x.d / x.v);
      return {p, d};
    }
  };
  struct Neg final : Node {
    Ptr a;
    explicit Neg(Ptr a) : a(std::move(a)) {}
    Dual eval(Dual u) const override {
      const Dual x = a->eval(u);
      return {-x.v, -x.d};
    }
  };
  struct Fn final : Node {
    bool is_exp;
    Ptr a;
    Fn(bool is_exp, Ptr a) : is_exp(is_exp), a(std::move(a)) {}
    Dual eval(Dual u) const override {
      const Dual x = a->eval(u);
      if (is_exp) {
        const double e = std::exp(x.v);
        return {e, e * x.d};
      }
      return {std::log(x.v), x.d / x.v};
    }
  };

  struct Parser {
    const std::string& s;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& what) const {
      throw Error(ErrorCode::MalformedInput, "expression '" + s + "' at " + std::to_string(pos) + ": " + what);
    }
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
    void expect(char c) {
      if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    Ptr expr() {
      Ptr lhs = term();
      for (;;) {
        if (eat('+'))
          lhs = std::make_shared<Bin>('+', lhs, term());
        else if (eat('-'))
          lhs = std::make_shared<Bin>('-', lhs, term());
        else
          return lhs;
      }
    }
    Ptr term() {
      Ptr lhs = unary();
      for (;;) {
        if (eat('*'))
          lhs = std::make_shared<Bin>('*', lhs, unary());
        else if (eat('/'))
          lhs = std::make_shared<Bin>('/', lhs, unary());
        else
          return lhs;
      }
    }
    Ptr unary() {
      if (eat('-')) return std::make_shared<Neg>(unary());
      if (eat('+')) return unary();
      return power();
    }
    Ptr power() {
      Ptr base = atom();
      if (eat('^')) return std::make_shared<Bin>('^', base, unary());
      return base;
    }
    Ptr atom() {
      skip();
      if (pos >= s.size()) fail("unexpected end");
      if (eat('(')) {
        Ptr e = expr();
        expect(')');
        return e;
      }
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(s.substr(pos), &used);
        } catch (const std::exception&) {
          fail("bad number");
        }
        pos += used;
        return std::make_shared<Num>(v);
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        const std::size_t start = pos;
        while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) ++pos;
        const std::string name = s.substr(start, pos - start);
        if (name == "u") return std::make_shared<Var>();
        if (name == "exp" || name == "log") {
          expect('(');
          Ptr a = expr();
          expect(')');
          return std::make_shared<Fn>(name == "exp", a);
        }
        if (name == "pow") {
          expect('(');
          Ptr a = expr();
          expect(',');
          Ptr b = expr();
          expect(')');
          return std::make_shared<Bin>('^', a, b);
        }
        pos = start;
        fail("unknown name '" + name + "'");
      }
      fail(std::string("unexpected '") + c + "'");
    }
  };

  Ptr root_;
  std::string text_;
};

}  // namespace curvlab
