#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "aqnn/cpwl.hpp"
#include "aqnn/geometry.hpp"
#include "aqnn/net.hpp"
#include "aqnn/quadrature.hpp"

namespace aqnn {

// A cell of the domain together with the affine map x -> W x + b that the
// surrogate sub-network computes on it. Merged cells carry no map.
struct LinearRegion {
  std::variant<Segment1D, ConvexPolygon> cell;
  Eigen::MatrixXd W;
  Eigen::VectorXd b;

  bool has_map() const { return W.size() > 0; }
  int dim() const { return std::holds_alternative<Segment1D>(cell) ? 1 : 2; }
  double measure() const;
  const Segment1D& segment() const { return std::get<Segment1D>(cell); }
  const ConvexPolygon& polygon() const { return std::get<ConvexPolygon>(cell); }
};

// Piece of the boundary: a sub-segment [a, b] of a boundary edge in 2D, or
// a single point (a == b) in 1D. The map is expressed in the edge
// parameter t, x = edge_start + t (edge_end - edge_start).
struct BoundaryRegion {
  Vec2 a;
  Vec2 b;
  Vec2 normal;
  bool is_point = false;
  Eigen::MatrixXd W;
  Eigen::VectorXd bias;

  double measure() const { return is_point ? 1.0 : norm(b - a); }
};

struct BoundaryEdge {
  Vec2 a;
  Vec2 b;
  Vec2 normal;  // outward unit normal
};

// Union of convex parts with its outer boundary.
class ConvexDomain {
 public:
  static ConvexDomain interval(double lo, double hi);
  static ConvexDomain from_segments(std::vector<Segment1D> parts);
  static ConvexDomain square(double lo, double hi);
  static ConvexDomain from_polygons(std::vector<ConvexPolygon> parts);

  int dim() const { return dim_; }
  const std::vector<Segment1D>& segments() const { return segments_; }
  const std::vector<ConvexPolygon>& polygons() const { return polygons_; }
  // In 1D the edges are degenerate (a == b) with normals +-e_x.
  const std::vector<BoundaryEdge>& boundary() const { return boundary_; }
  double measure() const;
  double boundary_measure() const;
  double diameter() const;

 private:
  int dim_ = 1;
  std::vector<Segment1D> segments_;
  std::vector<ConvexPolygon> polygons_;
  std::vector<BoundaryEdge> boundary_;
};

struct MeshStats {
  std::size_t fallback_cuts = 0;  // regions re-cut by sequential half-planes
  std::size_t merged_cells = 0;
  std::size_t stuck_cells = 0;    // small cells without a usable neighbour
};

struct AdaptedMesh {
  int dim = 1;
  std::vector<LinearRegion> domain_cells;
  std::vector<BoundaryRegion> boundary_cells;
  double median_measure = 0.0;  // median cell measure before merging
  int epoch = -1;
  MeshStats stats;

  double domain_measure() const;
  double boundary_measure() const;
};

// Splits a region whose map gives the pre-activations of a layer; each
// output map is composed with the surrogate pieces (alpha, beta) active on
// the sub-cell.
std::vector<LinearRegion> cut_region_1d(const LinearRegion& region, const CpwlFunction& surrogate);
std::vector<LinearRegion> cut_region_2d(const LinearRegion& region, const CpwlFunction& surrogate,
                                        MeshStats* stats = nullptr);

// Same cut via sequential half-plane splitting; used as a fallback.
std::vector<LinearRegion> cut_region_2d_sequential(const LinearRegion& region,
                                                   const CpwlFunction& surrogate);

AdaptedMesh adaptive_mesh(const NetworkParams& params, const CpwlFunction& surrogate,
                          const ConvexDomain& domain);

std::vector<BoundaryRegion> boundary_mesh(const NetworkParams& params,
                                          const CpwlFunction& surrogate,
                                          const ConvexDomain& domain);

AdaptedMesh merge_small_cells(const AdaptedMesh& mesh, double threshold_fraction);

// Domain cells as segments, triangles and convex quadrangles.
std::vector<QuadCell> quadrature_ready_cells(const AdaptedMesh& mesh);

}  // namespace aqnn
