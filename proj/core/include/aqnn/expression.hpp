#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "aqnn/geometry.hpp"

namespace aqnn {

// Value, gradient and Laplacian of a scalar field at a point.
struct Jet {
  double value = 0.0;
  Vec2 gradient;
  double laplacian = 0.0;
};

// Closed-form scalar field of x (and y in 2D), e.g. "sinc(2*pi*x)*sinc(2*pi*y)".
// Operators + - * / ^ (or **), constants pi and e, and the functions sin,
// cos, tan, exp, log, sqrt, tanh, sinh, cosh, atan, erf, sinc, abs.
// Derivatives are propagated exactly through the expression tree.
class Expression {
 public:
  // Throws ParseError with the 1-based column of the offending token.
  static Expression parse(std::string_view text, int dim);

  Jet jet(Vec2 p) const;
  double operator()(Vec2 p) const { return jet(p).value; }
  const std::string& text() const { return text_; }
  int dim() const { return dim_; }

  struct Node;

 private:
  std::string text_;
  int dim_ = 1;
  std::shared_ptr<const Node> root_;
};

}  // namespace aqnn
