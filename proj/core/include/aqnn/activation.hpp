#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aqnn {

// y = slope * x + intercept
struct Affine1D {
  double slope = 0.0;
  double intercept = 0.0;

  double operator()(double x) const { return slope * x + intercept; }
};

enum class ActivationKind { Abse, LnCosh, Erf, Tanh };

// Which reflection the activation is invariant under.
enum class Symmetry {
  Odd,        // rho(-x) = -rho(x)
  ReluLike,   // rho(x) - rho(-x) = x
};

// Closed interval [lo, hi]; endpoints may be infinite.
struct Interval {
  double lo;
  double hi;
};

// Smooth activation with closed-form derivatives up to order three.
// ReLU-like families approach 0 at -inf and x at +inf with
// sup |rho - ReLU| = epsilon; tanh has no parameter.
class SmoothActivation {
 public:
  static SmoothActivation abse(double epsilon = kDefaultEpsilon);
  static SmoothActivation lncosh(double epsilon = kDefaultEpsilon);
  static SmoothActivation erf(double epsilon = kDefaultEpsilon);
  static SmoothActivation tanh();
  // Names: "abse", "lncosh", "erf", "tanh". Epsilon is ignored for tanh.
  static SmoothActivation from_name(std::string_view name,
                                    std::optional<double> epsilon = {});

  static constexpr double kDefaultEpsilon = 1e-2;

  ActivationKind kind() const { return kind_; }
  std::string name() const;
  std::optional<double> epsilon() const;
  double gamma() const { return gamma_; }

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;
  double d3(double x) const;

  // Evaluates all four at once (shares the expensive subexpressions).
  void eval(double x, double* v, double* dv, double* ddv, double* dddv) const;

  Affine1D asymptote_neg() const;
  Affine1D asymptote_pos() const;
  // Zeros of rho''.
  std::span<const double> inflection_points() const;
  // Maximal intervals on which rho is strictly convex or concave.
  std::vector<Interval> convexity_intervals() const;
  // +1 if rho is convex on the interval containing x, -1 if concave.
  int curvature_sign(double x) const;
  // Decay exponent of |rho - asymptote| at infinity (infinite for tanh).
  double decay_exponent() const;
  Symmetry symmetry() const;
  // sup |rho'| over the real line.
  double lipschitz() const { return 1.0; }

  bool operator==(const SmoothActivation& other) const = default;

 private:
  SmoothActivation(ActivationKind kind, double epsilon, double gamma)
      : kind_(kind), epsilon_(epsilon), gamma_(gamma) {}

  ActivationKind kind_;
  double epsilon_;
  double gamma_;
};

}  // namespace aqnn
