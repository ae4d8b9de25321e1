#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aqnn/activation.hpp"

namespace aqnn {

// Continuous piecewise-linear function on the real line. Piece j is valid on
// [breakpoint(j-1), breakpoint(j)] with the unbounded pieces at both ends.
class CpwlFunction {
 public:
  struct Evaluation {
    double value;
    std::size_t piece;
  };

  CpwlFunction(std::vector<double> breakpoints, std::vector<Affine1D> pieces,
               std::vector<double> tangent_points = {});

  std::size_t num_pieces() const { return pieces_.size(); }
  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const Affine1D> pieces() const { return pieces_; }
  const Affine1D& piece(std::size_t j) const { return pieces_[j]; }
  // Tangent abscissae the pieces were built from, including +-inf sentinels.
  // Empty when the function was given directly.
  std::span<const double> tangent_points() const { return tangent_points_; }

  std::size_t piece_index(double x) const;
  Evaluation eval(double x) const;
  double operator()(double x) const { return eval(x).value; }

  bool operator==(const CpwlFunction& other) const = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<Affine1D> pieces_;
  std::vector<double> tangent_points_;
};

// Tangent line of act at x; x = +-inf gives the slant asymptotes.
Affine1D tangent(const SmoothActivation& act, double x);

// Abscissa where the tangents at x < y meet. Throws DomainError when the
// tangents are parallel or x, y lie on different sides of an inflection.
double tangent_intersection(const SmoothActivation& act, double x, double y);

// CPWL function made of the tangents at the given sorted abscissae. Must
// contain +-inf and every inflection point of act.
CpwlFunction build_cpwl(const SmoothActivation& act, std::span<const double> tangent_points);

// `count` points splitting the interval into count + 1 parts carrying equal
// mass of |rho''|^exponent.
std::vector<double> equidistribute_points(const SmoothActivation& act, Interval interval,
                                          int count, double exponent);

enum class DistanceNorm { Function, Derivative };

// L2(R) distance between rho and f (or between their derivatives).
double l2_distance(const SmoothActivation& act, const CpwlFunction& f,
                   DistanceNorm norm = DistanceNorm::Function);

// sup |rho - f| estimated at the breakpoints and on a dense grid.
double sup_distance(const SmoothActivation& act, const CpwlFunction& f);

struct FitOptions {
  int max_iterations = 10000;
  double tolerance = 1e-12;  // stop when the objective changes less than this
  double fuse_distance = 1e-9;
};

struct CpwlFit {
  CpwlFunction function;
  double distance;        // L2 distance of the returned function
  int iterations;
  std::size_t effective_pieces;
  bool symmetric;
  std::vector<std::string> warnings;
};

int minimal_pieces(const SmoothActivation& act);

// Best L2(R) approximation of act by tangent CPWL functions with `pieces`
// linear pieces, found by gradient descent over the free tangent abscissae.
CpwlFit best_l2_fit(const SmoothActivation& act, int pieces, const FitOptions& options = {});

// Least-squares slope of log(distance) against log(pieces).
double convergence_slope(std::span<const int> pieces, std::span<const double> distances);

}  // namespace aqnn
