#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace aqnn {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2 operator-() const { return {-x, -y}; }
  bool operator==(const Vec2&) const = default;
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Signed area (positive for counter-clockwise order).
double signed_area(const std::vector<Vec2>& vertices);
double diameter(const std::vector<Vec2>& vertices);

// Drops consecutive vertices closer than 1e-9 * scale and vertices lying on
// the segment joining their neighbours (within 1e-11 * scale).
std::vector<Vec2> clean_polygon(std::vector<Vec2> vertices);

// Convex polygon with counter-clockwise vertices and positive area.
// Construction cleans the vertex list first and throws InvalidPolygon if
// the result is not convex.
class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Vec2& operator[](std::size_t i) const { return vertices_[i]; }
  double area() const { return area_; }
  double diameter() const { return diameter_; }
  Vec2 centroid() const;
  // Closed membership with tolerance tol * diameter.
  bool contains(Vec2 p, double tol = 1e-12) const;

 private:
  std::vector<Vec2> vertices_;
  double area_;
  double diameter_;
};

// Simple (non self-intersecting) counter-clockwise polygon.
class SimplePolygon {
 public:
  explicit SimplePolygon(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  double area() const { return area_; }
  bool is_convex() const;
  bool contains(Vec2 p) const;

 private:
  std::vector<Vec2> vertices_;
  double area_;
};

struct Segment1D {
  double lo;
  double hi;

  Segment1D(double lo_, double hi_);
  double length() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
};

// Where a chord endpoint sits on the polygon boundary: on edge `edge`
// (from vertex edge to vertex edge+1) at parameter t in [0, 1].
struct BoundaryLocation {
  std::size_t edge;
  double t;
};

struct Chord {
  Vec2 a;
  Vec2 b;
  BoundaryLocation loc_a;
  BoundaryLocation loc_b;
};

// Chord of {x : dot(w, x) = c} inside poly; none if the line misses the
// interior, touches a vertex, or runs along an edge.
std::optional<Chord> clip_line(const ConvexPolygon& poly, Vec2 w, double c);

struct SegmentHit {
  Vec2 point;
  double s;  // position along the first segment, -1 at a0 and +1 at a1
  double t;  // same for the second segment
};

std::optional<SegmentHit> segment_intersection(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1);

// Parts of poly on either side of {dot(w, x) = c}: first where dot < c.
std::pair<std::optional<ConvexPolygon>, std::optional<ConvexPolygon>> split_by_line(
    const ConvexPolygon& poly, Vec2 w, double c);

// Triangles and convex quadrangles covering poly.
std::vector<ConvexPolygon> split_convex(const ConvexPolygon& poly);

// n - 2 triangles; throws SelfIntersectingPolygon via the SimplePolygon
// invariant when given raw vertices.
std::vector<ConvexPolygon> ear_clip(const SimplePolygon& poly);
std::vector<ConvexPolygon> ear_clip(const std::vector<Vec2>& vertices);

// Ear clipping followed by removal of diagonals that keep both sides
// convex; every piece is convex.
std::vector<ConvexPolygon> convex_decomposition(const SimplePolygon& poly);

// Boundary loops of the union of interior-disjoint polygons given as
// counter-clockwise vertex lists. Shared boundary pieces cancel, including
// partially overlapping edges. Returns an empty list if the boundary is not
// a set of closed simple loops.
std::vector<std::vector<Vec2>> union_boundary(const std::vector<std::vector<Vec2>>& polygons,
                                              double tol);

// Length of the common boundary of two polygons.
double shared_boundary_length(const std::vector<Vec2>& a, const std::vector<Vec2>& b, double tol);

// Union of two adjacent polygons; throws InvalidPolygon when they share no
// boundary or their union is not a simple polygon.
SimplePolygon merge_adjacent(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

}  // namespace aqnn
