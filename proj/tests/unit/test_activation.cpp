#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "aqnn/activation.hpp"
#include "aqnn/error.hpp"
#include "oracles.hpp"

using aqnn::SmoothActivation;

namespace {

std::vector<SmoothActivation> relu_families(double eps) {
  return {SmoothActivation::abse(eps), SmoothActivation::lncosh(eps), SmoothActivation::erf(eps)};
}

std::vector<SmoothActivation> all_families() {
  auto v = relu_families(0.1);
  v.push_back(SmoothActivation::tanh());
  return v;
}

double relu(double x) { return x > 0 ? x : 0.0; }

}  // namespace

TEST(Activation, AbseValueAtZeroIsEpsilon) {
  EXPECT_NEAR(SmoothActivation::abse(0.1).value(0.0), 0.1, 1e-15);
}

TEST(Activation, AbseSymmetry) {
  const auto a = SmoothActivation::abse(0.1);
  EXPECT_NEAR(a.value(1.7) - a.value(-1.7), 1.7, 1e-14);
}

TEST(Activation, AbseClosedFormFarFromOrigin) {
  const double gamma = 0.02;
  const double expected = 0.5 * (10.0 + gamma * std::sqrt(1.0 + (10.0 / gamma) * (10.0 / gamma)));
  const double v = SmoothActivation::abse(0.01).value(10.0);
  EXPECT_NEAR(v, expected, 1e-13);
  EXPECT_LT(std::abs(v - 10.0), 1e-4);
  EXPECT_GT(v, 10.0);
}

TEST(Activation, AlternativeFamiliesAtZero) {
  EXPECT_NEAR(SmoothActivation::lncosh(0.1).value(0.0), 0.1, 1e-15);
  EXPECT_NEAR(SmoothActivation::erf(0.1).value(0.0), 0.1, 1e-15);
}

TEST(Activation, LnCoshSymmetry) {
  const auto a = SmoothActivation::lncosh(0.05);
  for (double x : {0.3, 2.0, 8.0}) EXPECT_NEAR(a.value(x) - a.value(-x), x, 1e-13) << x;
}

TEST(Activation, TanhMetadata) {
  const auto t = SmoothActivation::tanh();
  EXPECT_DOUBLE_EQ(t.d1(0.0), 1.0);
  EXPECT_DOUBLE_EQ(t.d2(0.0), 0.0);
  EXPECT_DOUBLE_EQ(t.asymptote_pos().slope, 0.0);
  EXPECT_DOUBLE_EQ(t.asymptote_pos().intercept, 1.0);
  EXPECT_DOUBLE_EQ(t.asymptote_neg().intercept, -1.0);
  ASSERT_EQ(t.inflection_points().size(), 1u);
  EXPECT_EQ(t.inflection_points()[0], 0.0);
  EXPECT_FALSE(t.epsilon().has_value());
}

TEST(Activation, ReluAsymptotes) {
  for (const auto& a : relu_families(0.01)) {
    EXPECT_EQ(a.asymptote_neg().slope, 0.0) << a.name();
    EXPECT_EQ(a.asymptote_neg().intercept, 0.0) << a.name();
    EXPECT_EQ(a.asymptote_pos().slope, 1.0) << a.name();
    EXPECT_EQ(a.asymptote_pos().intercept, 0.0) << a.name();
    EXPECT_TRUE(a.inflection_points().empty()) << a.name();
  }
}

TEST(Activation, GammaPerFamily) {
  const double eps = 0.03;
  EXPECT_NEAR(SmoothActivation::abse(eps).gamma(), 2 * eps, 1e-15);
  EXPECT_NEAR(SmoothActivation::lncosh(eps).gamma(), 2 * eps / std::log(2.0), 1e-15);
  EXPECT_NEAR(SmoothActivation::erf(eps).gamma(), 2 * std::sqrt(M_PI) * eps, 1e-15);
}

TEST(Activation, InvalidEpsilon) {
  EXPECT_THROW(SmoothActivation::abse(0.0), aqnn::InvalidParameter);
  EXPECT_THROW(SmoothActivation::lncosh(-1.0), aqnn::InvalidParameter);
  EXPECT_THROW(SmoothActivation::erf(std::nan("")), aqnn::InvalidParameter);
  EXPECT_THROW(SmoothActivation::from_name("relu"), aqnn::InvalidParameter);
}

TEST(Activation, FromName) {
  EXPECT_EQ(SmoothActivation::from_name("abse"), SmoothActivation::abse());
  EXPECT_EQ(SmoothActivation::from_name("erf", 0.2), SmoothActivation::erf(0.2));
  EXPECT_EQ(SmoothActivation::from_name("tanh", 0.2), SmoothActivation::tanh());
  EXPECT_EQ(*SmoothActivation::abse().epsilon(), 1e-2);
}

TEST(Activation, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(7);
  for (const auto& a : all_families()) {
    for (int i = 0; i < 200; ++i) {
      const double x = oracle::uniform(rng, -20.0, 20.0);
      const double h = 1e-5;
      const double fd1 = oracle::central_difference([&](double t) { return a.value(t); }, x, h);
      const double fd2 = oracle::central_difference([&](double t) { return a.d1(t); }, x, h);
      const double fd3 = oracle::central_difference([&](double t) { return a.d2(t); }, x, h);
      EXPECT_NEAR(a.d1(x), fd1, 1e-6 * std::max(std::abs(fd1), 1e-3)) << a.name() << " x=" << x;
      EXPECT_NEAR(a.d2(x), fd2, 1e-6 * std::max(std::abs(fd2), 1e-3)) << a.name() << " x=" << x;
      EXPECT_NEAR(a.d3(x), fd3, 1e-6 * std::max(std::abs(fd3), 1e-3)) << a.name() << " x=" << x;
    }
  }
}

TEST(Activation, EvalMatchesIndividualCalls) {
  for (const auto& a : all_families()) {
    for (double x : {-3.0, -0.05, 0.0, 0.4, 12.0}) {
      double v, d1, d2, d3;
      a.eval(x, &v, &d1, &d2, &d3);
      EXPECT_DOUBLE_EQ(v, a.value(x));
      EXPECT_DOUBLE_EQ(d1, a.d1(x));
      EXPECT_DOUBLE_EQ(d2, a.d2(x));
      EXPECT_DOUBLE_EQ(d3, a.d3(x));
    }
  }
}

TEST(Activation, TailsApproachAsymptotesMonotonically) {
  for (const auto& a : all_families()) {
    double prev_pos = INFINITY, prev_neg = INFINITY;
    for (double x = 20.0; x <= 200.0; x += 0.5) {
      const double gp = std::abs(a.value(x) - a.asymptote_pos()(x));
      const double gn = std::abs(a.value(-x) - a.asymptote_neg()(-x));
      EXPECT_LE(gp, prev_pos) << a.name() << " x=" << x;
      EXPECT_LE(gn, prev_neg) << a.name() << " x=" << -x;
      prev_pos = gp;
      prev_neg = gn;
    }
  }
}

TEST(Activation, SecondDerivativeSignConstantBetweenInflections) {
  for (const auto& a : all_families()) {
    for (double x = -30.0; x <= 30.0; x += 0.01) {
      if (std::abs(x) < 1e-9) continue;
      const double d2 = a.d2(x);
      if (d2 == 0.0) continue;  // underflow far in the tails
      EXPECT_EQ(d2 > 0 ? 1 : -1, a.curvature_sign(x)) << a.name() << " x=" << x;
    }
  }
}

TEST(Activation, SupDistanceToReluIsEpsilon) {
  for (double eps : {1e-3, 1e-2, 1e-1}) {
    for (const auto& a : relu_families(eps)) {
      double sup = 0.0;
      for (int i = -200000; i <= 200000; ++i) {
        const double x = 1e-4 * i;
        const double gap = a.value(x) - relu(x);
        EXPECT_GE(gap, -1e-15) << a.name() << " x=" << x;
        sup = std::max(sup, std::abs(gap));
      }
      EXPECT_NEAR(sup, eps, 1e-12) << a.name() << " eps=" << eps;
      EXPECT_NEAR(a.value(0.0), eps, 1e-12) << a.name();
    }
  }
}

TEST(Activation, AbseCubicDecayOfCurvature) {
  const auto a = SmoothActivation::abse(0.01);
  double bound = 0.0;
  for (double x = 1.0; x <= 1e3; x *= 1.01) {
    bound = std::max({bound, std::abs(x * x * x * a.d2(x)), std::abs(x * x * x * a.d2(-x))});
  }
  const double gamma = a.gamma();
  // x^3 rho'' -> gamma^2 / 2 from below.
  EXPECT_LE(bound, 0.5 * gamma * gamma * (1 + 1e-9));
}
