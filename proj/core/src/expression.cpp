#include "aqnn/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "aqnn/error.hpp"

namespace aqnn {

enum class Op { Number, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Call };
enum class Fn { Sin, Cos, Tan, Exp, Log, Sqrt, Tanh, Sinh, Cosh, Atan, Erf, Sinc, Abs };

struct Expression::Node {
  Op op;
  double number = 0.0;
  Fn fn = Fn::Sin;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;

  bool constant() const {
    if (op == Op::VarX || op == Op::VarY) return false;
    return (!lhs || lhs->constant()) && (!rhs || rhs->constant());
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

struct Derivs {
  double f, d1, d2;
};

// sin(t)/t and its first two derivatives; series near zero.
Derivs sinc_derivs(double t) {
  if (std::abs(t) < 1e-2) {
    const double t2 = t * t;
    return {1.0 - t2 / 6.0 + t2 * t2 / 120.0 - t2 * t2 * t2 / 5040.0,
            t * (-1.0 / 3.0 + t2 / 30.0 - t2 * t2 / 840.0),
            -1.0 / 3.0 + t2 / 10.0 - t2 * t2 / 168.0 + t2 * t2 * t2 / 6480.0};
  }
  const double s = std::sin(t), c = std::cos(t);
  return {s / t, (t * c - s) / (t * t), ((2.0 - t * t) * s - 2.0 * t * c) / (t * t * t)};
}

Derivs call_derivs(Fn fn, double t) {
  constexpr double two_over_sqrt_pi = 2.0 / 1.7724538509055160273;
  switch (fn) {
    case Fn::Sin: return {std::sin(t), std::cos(t), -std::sin(t)};
    case Fn::Cos: return {std::cos(t), -std::sin(t), -std::cos(t)};
    case Fn::Tan: {
      const double v = std::tan(t);
      return {v, 1.0 + v * v, 2.0 * v * (1.0 + v * v)};
    }
    case Fn::Exp: {
      const double v = std::exp(t);
      return {v, v, v};
    }
    case Fn::Log: return {std::log(t), 1.0 / t, -1.0 / (t * t)};
    case Fn::Sqrt: {
      const double v = std::sqrt(t);
      return {v, 0.5 / v, -0.25 / (v * t)};
    }
    case Fn::Tanh: {
      const double v = std::tanh(t), s = 1.0 - v * v;
      return {v, s, -2.0 * v * s};
    }
    case Fn::Sinh: return {std::sinh(t), std::cosh(t), std::sinh(t)};
    case Fn::Cosh: return {std::cosh(t), std::sinh(t), std::cosh(t)};
    case Fn::Atan: {
      const double q = 1.0 / (1.0 + t * t);
      return {std::atan(t), q, -2.0 * t * q * q};
    }
    case Fn::Erf: {
      const double g = two_over_sqrt_pi * std::exp(-t * t);
      return {std::erf(t), g, -2.0 * t * g};
    }
    case Fn::Sinc: return sinc_derivs(t);
    case Fn::Abs: return {std::abs(t), t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0), 0.0};
  }
  return {0.0, 0.0, 0.0};
}

Jet chain(const Jet& a, Derivs d) {
  return {d.f, a.gradient * d.d1, d.d1 * a.laplacian + d.d2 * dot(a.gradient, a.gradient)};
}

Jet multiply(const Jet& a, const Jet& b) {
  return {a.value * b.value, a.gradient * b.value + b.gradient * a.value,
          a.value * b.laplacian + b.value * a.laplacian + 2.0 * dot(a.gradient, b.gradient)};
}

Jet eval(const Expression::Node& n, Vec2 p) {
  switch (n.op) {
    case Op::Number: return {n.number, {}, 0.0};
    case Op::VarX: return {p.x, {1.0, 0.0}, 0.0};
    case Op::VarY: return {p.y, {0.0, 1.0}, 0.0};
    case Op::Neg: {
      const Jet a = eval(*n.lhs, p);
      return {-a.value, -a.gradient, -a.laplacian};
    }
    case Op::Add:
    case Op::Sub: {
      const Jet a = eval(*n.lhs, p), b = eval(*n.rhs, p);
      const double s = n.op == Op::Add ? 1.0 : -1.0;
      return {a.value + s * b.value, a.gradient + b.gradient * s, a.laplacian + s * b.laplacian};
    }
    case Op::Mul: return multiply(eval(*n.lhs, p), eval(*n.rhs, p));
    case Op::Div: {
      const Jet b = eval(*n.rhs, p);
      const double t = b.value;
      return multiply(eval(*n.lhs, p), chain(b, {1.0 / t, -1.0 / (t * t), 2.0 / (t * t * t)}));
    }
    case Op::Pow: {
      const Jet a = eval(*n.lhs, p);
      if (n.rhs->constant()) {
        const double c = eval(*n.rhs, p).value, t = a.value;
        if (c == 0.0) return {1.0, {}, 0.0};
        const double d1 = c * std::pow(t, c - 1.0);
        const double d2 = c == 1.0 ? 0.0 : c * (c - 1.0) * std::pow(t, c - 2.0);
        return chain(a, {std::pow(t, c), d1, d2});
      }
      const Jet b = eval(*n.rhs, p);
      const Jet e = multiply(b, chain(a, call_derivs(Fn::Log, a.value)));
      return chain(e, call_derivs(Fn::Exp, e.value));
    }
    case Op::Call: {
      const Jet a = eval(*n.lhs, p);
      return chain(a, call_derivs(n.fn, a.value));
    }
  }
  return {};
}

class Parser {
 public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression: " + what + " at column " + std::to_string(pos_ + 1), 1,
                     static_cast<int>(pos_) + 1);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_space();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  static NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept("+")) {
        lhs = make(Op::Add, lhs, term());
      } else if (accept("-")) {
        lhs = make(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      skip_space();
      if (text_.substr(pos_, 2) == "**") return lhs;
      if (accept("*")) {
        lhs = make(Op::Mul, lhs, unary());
      } else if (accept("/")) {
        lhs = make(Op::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept("-")) return make(Op::Neg, unary());
    if (accept("+")) return unary();
    NodePtr base = primary();
    if (accept("^") || accept("**")) return make(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(")")) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    const std::string rest(text_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ = start + used;
    auto n = std::make_shared<Expression::Node>();
    n->op = Op::Number;
    n->number = v;
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    static const std::pair<const char*, Fn> functions[] = {
        {"sin", Fn::Sin},   {"cos", Fn::Cos},   {"tan", Fn::Tan},   {"exp", Fn::Exp},
        {"log", Fn::Log},   {"sqrt", Fn::Sqrt}, {"tanh", Fn::Tanh}, {"sinh", Fn::Sinh},
        {"cosh", Fn::Cosh}, {"atan", Fn::Atan}, {"erf", Fn::Erf},   {"sinc", Fn::Sinc},
        {"abs", Fn::Abs}};
    for (const auto& [fname, fn] : functions) {
      if (name != fname) continue;
      if (!accept("(")) fail("expected '(' after " + name);
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::Call;
      n->fn = fn;
      n->lhs = expr();
      if (!accept(")")) fail("expected ')'");
      return n;
    }
    auto n = std::make_shared<Expression::Node>();
    if (name == "x") {
      n->op = Op::VarX;
    } else if (name == "y" && dim_ == 2) {
      n->op = Op::VarY;
    } else if (name == "pi") {
      n->op = Op::Number;
      n->number = std::numbers::pi;
    } else if (name == "e") {
      n->op = Op::Number;
      n->number = std::numbers::e;
    } else {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    return n;
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text, int dim) {
  if (dim != 1 && dim != 2) throw InvalidParameter("expression dimension must be 1 or 2");
  Expression e;
  e.text_ = std::string(text);
  e.dim_ = dim;
  e.root_ = Parser(text, dim).parse();
  return e;
}

Jet Expression::jet(Vec2 p) const { return eval(*root_, p); }

}  // namespace aqnn
