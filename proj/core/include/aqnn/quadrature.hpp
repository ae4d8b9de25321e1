#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "aqnn/geometry.hpp"

namespace aqnn {

struct GaussNode {
  double x;  // on [-1, 1]
  double w;
};

// n-point Gauss-Legendre rule on [-1, 1], n in [1, 64]. Cached.
std::span<const GaussNode> gauss_legendre(int n);

enum class Shape { Segment, Triangle, Quadrangle };

// Reference shapes: segment [-1, 1]; triangle (0,0), (1,0), (0,1);
// quadrangle [-1, 1]^2. Segment rules use only the first coordinate.
struct QuadratureRule {
  Shape shape;
  int order;  // every polynomial of total degree <= order is exact
  std::vector<Vec2> points;
  std::vector<double> weights;
};

inline constexpr int kMaxOrder = 10;

// Cached rule; throws UnsupportedOrder outside [1, kMaxOrder].
const QuadratureRule& rule(Shape shape, int order);

double reference_measure(Shape shape);

// Integration cell ready for a reference rule: a segment (2 vertices, 1D
// coordinates in x), a physical segment in the plane (`planar_segment`),
// a triangle, or a convex quadrangle.
struct QuadCell {
  Shape shape;
  std::vector<Vec2> vertices;
  double measure = 0.0;
};

QuadCell make_segment_cell(double lo, double hi);
QuadCell make_polygon_cell(const ConvexPolygon& poly);  // 3 or 4 vertices

struct MappedPoints {
  std::vector<Vec2> points;
  std::vector<double> weights;
};

// Physical points and weights of `r` on `cell`, appended to `out`.
// Throws DegenerateCell for zero-measure cells.
void map_rule(const QuadratureRule& r, const QuadCell& cell, MappedPoints& out);
MappedPoints map_rule(const QuadratureRule& r, const QuadCell& cell);

double integrate(const std::function<double(Vec2)>& f, std::span<const QuadCell> cells,
                 int order);

}  // namespace aqnn
