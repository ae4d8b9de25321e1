#include "aqnn/activation.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "aqnn/error.hpp"

namespace aqnn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTanhInflection[] = {0.0};

void require_positive(double epsilon, const char* family) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidParameter(std::string(family) + ": epsilon must be positive and finite");
  }
}

}  // namespace

SmoothActivation SmoothActivation::abse(double epsilon) {
  require_positive(epsilon, "abse");
  return SmoothActivation(ActivationKind::Abse, epsilon, 2.0 * epsilon);
}

SmoothActivation SmoothActivation::lncosh(double epsilon) {
  require_positive(epsilon, "lncosh");
  return SmoothActivation(ActivationKind::LnCosh, epsilon, 2.0 * epsilon / std::numbers::ln2);
}

SmoothActivation SmoothActivation::erf(double epsilon) {
  require_positive(epsilon, "erf");
  return SmoothActivation(ActivationKind::Erf, epsilon,
                          2.0 * std::sqrt(std::numbers::pi) * epsilon);
}

SmoothActivation SmoothActivation::tanh() {
  return SmoothActivation(ActivationKind::Tanh, 0.0, 1.0);
}

SmoothActivation SmoothActivation::from_name(std::string_view name,
                                             std::optional<double> epsilon) {
  const double eps = epsilon.value_or(kDefaultEpsilon);
  if (name == "abse") return abse(eps);
  if (name == "lncosh") return lncosh(eps);
  if (name == "erf") return erf(eps);
  if (name == "tanh") return tanh();
  throw InvalidParameter("unknown activation '" + std::string(name) + "'");
}

std::string SmoothActivation::name() const {
  switch (kind_) {
    case ActivationKind::Abse: return "abse";
    case ActivationKind::LnCosh: return "lncosh";
    case ActivationKind::Erf: return "erf";
    case ActivationKind::Tanh: return "tanh";
  }
  return {};
}

std::optional<double> SmoothActivation::epsilon() const {
  if (kind_ == ActivationKind::Tanh) return std::nullopt;
  return epsilon_;
}

void SmoothActivation::eval(double x, double* v, double* dv, double* ddv, double* dddv) const {
  const double g = gamma_;
  switch (kind_) {
    case ActivationKind::Abse: {
      const double s = std::hypot(g, x);
      // x + s and 1 + x/s cancel for x << 0; use the conjugate forms there.
      const double sum = x >= 0.0 ? x + s : g * g / (s - x);
      if (v) *v = 0.5 * sum;
      if (dv) *dv = 0.5 * sum / s;
      const double s3 = s * s * s;
      if (ddv) *ddv = 0.5 * g * g / s3;
      if (dddv) *dddv = -1.5 * g * g * x / (s3 * s * s);
      return;
    }
    case ActivationKind::LnCosh: {
      const double t = x / g;
      const double e = std::exp(-2.0 * std::abs(t));
      if (v) *v = 0.5 * (x + std::abs(x) + g * std::log1p(e));
      const double th = std::tanh(t);
      // 0.5 (1 + tanh t) = 1 / (1 + exp(-2t)), stable for t << 0.
      if (dv) *dv = t >= 0.0 ? 0.5 * (1.0 + th) : e / (1.0 + e);
      const double sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
      if (ddv) *ddv = 0.5 * sech2 / g;
      if (dddv) *dddv = -sech2 * th / (g * g);
      return;
    }
    case ActivationKind::Erf: {
      const double t = x / g;
      const double gauss = std::exp(-t * t);
      const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
      const double cdf = std::erfc(-t);  // 1 + erf(t)
      if (v) *v = 0.5 * (x * cdf + g * inv_sqrt_pi * gauss);
      if (dv) *dv = 0.5 * cdf;
      if (ddv) *ddv = gauss * inv_sqrt_pi / g;
      if (dddv) *dddv = -2.0 * x * gauss * inv_sqrt_pi / (g * g * g);
      return;
    }
    case ActivationKind::Tanh: {
      const double t = std::tanh(x);
      const double sech2 = 1.0 - t * t;
      if (v) *v = t;
      if (dv) *dv = sech2;
      if (ddv) *ddv = -2.0 * t * sech2;
      if (dddv) *dddv = sech2 * (6.0 * t * t - 2.0);
      return;
    }
  }
}

double SmoothActivation::value(double x) const {
  double v = 0.0;
  eval(x, &v, nullptr, nullptr, nullptr);
  return v;
}

double SmoothActivation::d1(double x) const {
  double v = 0.0;
  eval(x, nullptr, &v, nullptr, nullptr);
  return v;
}

double SmoothActivation::d2(double x) const {
  double v = 0.0;
  eval(x, nullptr, nullptr, &v, nullptr);
  return v;
}

double SmoothActivation::d3(double x) const {
  double v = 0.0;
  eval(x, nullptr, nullptr, nullptr, &v);
  return v;
}

Affine1D SmoothActivation::asymptote_neg() const {
  if (kind_ == ActivationKind::Tanh) return {0.0, -1.0};
  return {0.0, 0.0};
}

Affine1D SmoothActivation::asymptote_pos() const {
  if (kind_ == ActivationKind::Tanh) return {0.0, 1.0};
  return {1.0, 0.0};
}

std::span<const double> SmoothActivation::inflection_points() const {
  if (kind_ == ActivationKind::Tanh) return kTanhInflection;
  return {};
}

std::vector<Interval> SmoothActivation::convexity_intervals() const {
  if (kind_ == ActivationKind::Tanh) return {{-kInf, 0.0}, {0.0, kInf}};
  return {{-kInf, kInf}};
}

int SmoothActivation::curvature_sign(double x) const {
  if (kind_ == ActivationKind::Tanh) return x < 0.0 ? 1 : -1;
  return 1;
}

double SmoothActivation::decay_exponent() const {
  return kind_ == ActivationKind::Abse ? 1.0 : kInf;
}

Symmetry SmoothActivation::symmetry() const {
  return kind_ == ActivationKind::Tanh ? Symmetry::Odd : Symmetry::ReluLike;
}

}  // namespace aqnn
