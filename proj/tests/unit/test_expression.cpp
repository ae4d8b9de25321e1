#include <cmath>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "aqnn/error.hpp"
#include "aqnn/expression.hpp"
#include "oracles.hpp"

using aqnn::Expression;

TEST(Expression, Arithmetic) {
  const auto e = Expression::parse("1 + 2*x - y/4 + x^2 + 2**3", 2);
  EXPECT_DOUBLE_EQ(e({3, 8}), 1 + 6 - 2 + 9 + 8);
  EXPECT_DOUBLE_EQ(Expression::parse("-x^2", 1)({3, 0}), -9.0);
  EXPECT_DOUBLE_EQ(Expression::parse("2^3^2", 1)({0, 0}), 512.0);
  EXPECT_NEAR(Expression::parse("pi + e", 1)({0, 0}), M_PI + M_E, 1e-15);
  EXPECT_DOUBLE_EQ(Expression::parse("1.5e-1", 1)({0, 0}), 0.15);
}

TEST(Expression, Functions) {
  const aqnn::Vec2 p{0.3, -0.7};
  EXPECT_DOUBLE_EQ(Expression::parse("sin(x)*cos(y)", 2)(p), std::sin(0.3) * std::cos(-0.7));
  EXPECT_DOUBLE_EQ(Expression::parse("exp(x) + log(2) + sqrt(4)", 1)(p), std::exp(0.3) + std::log(2.0) + 2.0);
  EXPECT_NEAR(Expression::parse("tanh(y) + atan(x) + erf(x)", 2)(p),
              std::tanh(-0.7) + std::atan(0.3) + std::erf(0.3), 1e-15);
  EXPECT_DOUBLE_EQ(Expression::parse("abs(y)", 2)(p), 0.7);
  EXPECT_DOUBLE_EQ(Expression::parse("sinc(0)", 1)(p), 1.0);
  EXPECT_NEAR(Expression::parse("sinc(x)", 1)(p), std::sin(0.3) / 0.3, 1e-15);
}

TEST(Expression, ParseErrorsCarryColumn) {
  try {
    Expression::parse("x + * 2", 1);
    FAIL();
  } catch (const aqnn::ParseError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(e.column(), 5);
  }
  EXPECT_THROW(Expression::parse("y + 1", 1), aqnn::ParseError);
  EXPECT_THROW(Expression::parse("foo(x)", 1), aqnn::ParseError);
  EXPECT_THROW(Expression::parse("(x + 1", 1), aqnn::ParseError);
  EXPECT_THROW(Expression::parse("", 1), aqnn::ParseError);
}

TEST(Expression, JetsMatchFiniteDifferences) {
  const char* exprs[] = {
      "sinc(2*pi*x)*sinc(2*pi*y)", "tanh(10*(x^2 + y^2 - 0.5^2))", "exp(-x*y) / (2 + cos(y))",
      "sqrt(1 + x^2 + y^2) * atan(x - y)", "erf(x) * sinh(y) + cosh(x) * tan(0.3*y)",
      "log(3 + x) * abs(y + 5) + x^y", "sinc(3*pi*x) - x^3"};
  std::mt19937_64 rng(13);
  for (const char* text : exprs) {
    const auto e = Expression::parse(text, 2);
    for (int k = 0; k < 20; ++k) {
      const aqnn::Vec2 p{oracle::uniform(rng, 0.05, 0.95), oracle::uniform(rng, 0.05, 0.95)};
      const double h = 1e-4;
      const auto f = [&](double x, double y) { return e({x, y}); };
      const auto j = e.jet(p);
      const double gx = (f(p.x + h, p.y) - f(p.x - h, p.y)) / (2 * h);
      const double gy = (f(p.x, p.y + h) - f(p.x, p.y - h)) / (2 * h);
      const double lap = (f(p.x + h, p.y) + f(p.x - h, p.y) + f(p.x, p.y + h) + f(p.x, p.y - h) -
                          4 * f(p.x, p.y)) /
                         (h * h);
      EXPECT_NEAR(j.gradient.x, gx, 1e-6 * std::max(1.0, std::abs(gx))) << text;
      EXPECT_NEAR(j.gradient.y, gy, 1e-6 * std::max(1.0, std::abs(gy))) << text;
      EXPECT_NEAR(j.laplacian, lap, 1e-4 * std::max(1.0, std::abs(lap))) << text;
    }
  }
}

TEST(Expression, SincSeriesNearZero) {
  const auto e = Expression::parse("sinc(x)", 1);
  for (double x : {1e-3, -4e-3, 9e-3, 1.1e-2}) {
    const auto j = e.jet({x, 0});
    EXPECT_NEAR(j.value, std::sin(x) / x, 1e-15);
    EXPECT_NEAR(j.gradient.x, (x * std::cos(x) - std::sin(x)) / (x * x), 1e-12);
    EXPECT_NEAR(j.laplacian, -1.0 / 3.0 + x * x / 10.0, 1e-9);
  }
  const auto z = e.jet({0, 0});
  EXPECT_EQ(z.value, 1.0);
  EXPECT_EQ(z.gradient.x, 0.0);
  EXPECT_NEAR(z.laplacian, -1.0 / 3.0, 1e-15);
}

TEST(Expression, OneDimensionalJetHasNoYComponent) {
  const auto e = Expression::parse("x^3", 1);
  const auto j = e.jet({2, 5});
  EXPECT_DOUBLE_EQ(j.value, 8.0);
  EXPECT_DOUBLE_EQ(j.gradient.x, 12.0);
  EXPECT_DOUBLE_EQ(j.gradient.y, 0.0);
  EXPECT_DOUBLE_EQ(j.laplacian, 12.0);
  EXPECT_EQ(e.text(), "x^3");
  EXPECT_EQ(e.dim(), 1);
}
