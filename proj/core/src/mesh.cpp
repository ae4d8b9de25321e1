#include "aqnn/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <unordered_set>

#include "aqnn/error.hpp"
#include "point_index.hpp"

namespace aqnn {
namespace {

// Map of the activated layer on a sub-cell where the pre-activation map is
// (W, b) and `probe` is an interior point.
void compose_with_pieces(const CpwlFunction& surrogate, const Eigen::MatrixXd& W,
                         const Eigen::VectorXd& b, const Eigen::VectorXd& probe,
                         Eigen::MatrixXd& W_out, Eigen::VectorXd& b_out) {
  const Eigen::VectorXd z = W * probe + b;
  W_out.resize(W.rows(), W.cols());
  b_out.resize(b.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const Affine1D& p = surrogate.piece(surrogate.piece_index(z[i]));
    W_out.row(i) = p.slope * W.row(i);
    b_out[i] = p.slope * b[i] + p.intercept;
  }
}

LinearRegion make_region_2d(ConvexPolygon poly, const CpwlFunction& surrogate,
                            const Eigen::MatrixXd& W, const Eigen::VectorXd& b) {
  const Vec2 c = poly.centroid();
  LinearRegion r{std::move(poly), {}, {}};
  compose_with_pieces(surrogate, W, b, Eigen::Vector2d(c.x, c.y), r.W, r.b);
  return r;
}

struct CutLine {
  Eigen::Index row;
  Vec2 w;
  double c;  // line {x : w . x = c}
};

std::vector<CutLine> cut_lines(const ConvexPolygon& poly, const Eigen::MatrixXd& W,
                               const Eigen::VectorXd& b, const CpwlFunction& surrogate) {
  std::vector<CutLine> lines;
  const auto bps = surrogate.breakpoints();
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    const Vec2 w{W(i, 0), W(i, 1)};
    if (norm(w) == 0.0) continue;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Vec2 v : poly.vertices()) {
      const double h = dot(w, v) + b[i];
      lo = std::min(lo, h);
      hi = std::max(hi, h);
    }
    auto first = std::upper_bound(bps.begin(), bps.end(), lo);
    for (auto it = first; it != bps.end() && *it < hi; ++it) lines.push_back({i, w, *it - b[i]});
  }
  return lines;
}

}  // namespace

double LinearRegion::measure() const {
  return dim() == 1 ? segment().length() : polygon().area();
}

// ---- domains ------------------------------------------------------------------------

ConvexDomain ConvexDomain::interval(double lo, double hi) {
  return from_segments({Segment1D(lo, hi)});
}

ConvexDomain ConvexDomain::from_segments(std::vector<Segment1D> parts) {
  if (parts.empty()) throw InvalidParameter("domain needs at least one part");
  std::sort(parts.begin(), parts.end(),
            [](const Segment1D& a, const Segment1D& b) { return a.lo < b.lo; });
  ConvexDomain d;
  d.dim_ = 1;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (parts[i].hi > parts[i + 1].lo) throw InvalidParameter("domain parts overlap");
  }
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const bool left_shared = i > 0 && parts[i - 1].hi == parts[i].lo;
    const bool right_shared = i + 1 < parts.size() && parts[i + 1].lo == parts[i].hi;
    if (!left_shared) d.boundary_.push_back({{parts[i].lo, 0.0}, {parts[i].lo, 0.0}, {-1.0, 0.0}});
    if (!right_shared) d.boundary_.push_back({{parts[i].hi, 0.0}, {parts[i].hi, 0.0}, {1.0, 0.0}});
  }
  d.segments_ = std::move(parts);
  return d;
}

ConvexDomain ConvexDomain::square(double lo, double hi) {
  return from_polygons({ConvexPolygon({{lo, lo}, {hi, lo}, {hi, hi}, {lo, hi}})});
}

ConvexDomain ConvexDomain::from_polygons(std::vector<ConvexPolygon> parts) {
  if (parts.empty()) throw InvalidParameter("domain needs at least one part");
  ConvexDomain d;
  d.dim_ = 2;
  std::vector<std::vector<Vec2>> loops_in;
  double diam = 0.0, area = 0.0;
  for (const auto& p : parts) {
    loops_in.push_back(p.vertices());
    diam = std::max(diam, p.diameter());
    area += p.area();
  }
  const auto loops = union_boundary(loops_in, 1e-9 * diam);
  if (loops.empty()) throw InvalidParameter("domain parts do not form a valid region");
  double loop_area = 0.0;
  for (const auto& loop : loops) {
    loop_area += signed_area(loop);
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Vec2 a = loop[i], b = loop[(i + 1) % loop.size()];
      const Vec2 e = b - a;
      const double len = norm(e);
      d.boundary_.push_back({a, b, Vec2{e.y, -e.x} / len});
    }
  }
  if (std::abs(loop_area - area) > 1e-9 * area) {
    throw InvalidParameter("domain parts overlap or leave gaps");
  }
  d.polygons_ = std::move(parts);
  return d;
}

double ConvexDomain::measure() const {
  double m = 0.0;
  for (const auto& s : segments_) m += s.length();
  for (const auto& p : polygons_) m += p.area();
  return m;
}

double ConvexDomain::boundary_measure() const {
  if (dim_ == 1) return static_cast<double>(boundary_.size());
  double m = 0.0;
  for (const auto& e : boundary_) m += norm(e.b - e.a);
  return m;
}

double ConvexDomain::diameter() const {
  if (dim_ == 1) return segments_.back().hi - segments_.front().lo;
  std::vector<Vec2> pts;
  for (const auto& p : polygons_) pts.insert(pts.end(), p.vertices().begin(), p.vertices().end());
  return aqnn::diameter(pts);
}

double AdaptedMesh::domain_measure() const {
  double m = 0.0;
  for (const auto& c : domain_cells) m += c.measure();
  return m;
}

double AdaptedMesh::boundary_measure() const {
  double m = 0.0;
  for (const auto& c : boundary_cells) m += c.measure();
  return m;
}

// ---- cutting ----------------------------------------------------------------------

std::vector<LinearRegion> cut_region_1d(const LinearRegion& region, const CpwlFunction& surrogate) {
  const Segment1D& seg = region.segment();
  const double mid = seg.midpoint(), half = 0.5 * seg.length();
  const auto bps = surrogate.breakpoints();
  std::vector<double> ts{-1.0, 1.0};
  for (Eigen::Index i = 0; i < region.W.rows(); ++i) {
    const double hm = region.W(i, 0) * seg.lo + region.b[i];
    const double hp = region.W(i, 0) * seg.hi + region.b[i];
    if (hm == hp) continue;
    const double lo = std::min(hm, hp), hi = std::max(hm, hp);
    for (auto it = std::upper_bound(bps.begin(), bps.end(), lo); it != bps.end() && *it < hi; ++it) {
      ts.push_back((2.0 * *it - (hp + hm)) / (hp - hm));
    }
  }
  std::sort(ts.begin(), ts.end());
  std::vector<LinearRegion> out;
  double prev = seg.lo;
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double x = k + 1 == ts.size() ? seg.hi : mid + half * std::clamp(ts[k], -1.0, 1.0);
    if (!(x > prev)) continue;  // zero-width piece
    LinearRegion r{Segment1D(prev, x), {}, {}};
    compose_with_pieces(surrogate, region.W, region.b,
                        Eigen::VectorXd::Constant(1, 0.5 * (prev + x)), r.W, r.b);
    out.push_back(std::move(r));
    prev = x;
  }
  return out;
}

std::vector<LinearRegion> cut_region_2d_sequential(const LinearRegion& region,
                                                   const CpwlFunction& surrogate) {
  const ConvexPolygon& poly = region.polygon();
  std::vector<ConvexPolygon> pieces{poly};
  for (const CutLine& line : cut_lines(poly, region.W, region.b, surrogate)) {
    std::vector<ConvexPolygon> next;
    for (const auto& p : pieces) {
      auto [below, above] = split_by_line(p, line.w, line.c);
      if (below && above) {
        next.push_back(std::move(*below));
        next.push_back(std::move(*above));
      } else {
        next.push_back(p);
      }
    }
    pieces = std::move(next);
  }
  std::vector<LinearRegion> out;
  for (auto& p : pieces) out.push_back(make_region_2d(std::move(p), surrogate, region.W, region.b));
  return out;
}

std::vector<LinearRegion> cut_region_2d(const LinearRegion& region, const CpwlFunction& surrogate,
                                        MeshStats* stats) {
  const ConvexPolygon& poly = region.polygon();
  const std::vector<CutLine> lines = cut_lines(poly, region.W, region.b, surrogate);

  // (i) chords of the cut lines.
  struct ChordInfo {
    Chord chord;
    Eigen::Index row;
    std::vector<std::pair<double, std::size_t>> stops;  // (position in [-1, 1], vertex)
  };
  std::vector<ChordInfo> chords;
  for (const CutLine& l : lines) {
    if (auto ch = clip_line(poly, l.w, l.c)) chords.push_back({*ch, l.row, {}});
  }
  if (chords.empty()) {
    return {make_region_2d(poly, surrogate, region.W, region.b)};
  }

  const double diam = poly.diameter();
  detail::PointIndex index(1e-9 * diam);
  const auto& verts = poly.vertices();
  const std::size_t nv = verts.size();
  std::vector<std::size_t> vid(nv);
  for (std::size_t i = 0; i < nv; ++i) vid[i] = index.insert(verts[i]);

  std::vector<std::vector<std::pair<double, std::size_t>>> edge_stops(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    edge_stops[i].push_back({0.0, vid[i]});
    edge_stops[i].push_back({1.0, vid[(i + 1) % nv]});
  }
  for (auto& c : chords) {
    const std::size_t ia = index.insert(c.chord.a), ib = index.insert(c.chord.b);
    c.stops.push_back({-1.0, ia});
    c.stops.push_back({1.0, ib});
    edge_stops[c.chord.loc_a.edge].push_back({c.chord.loc_a.t, ia});
    edge_stops[c.chord.loc_b.edge].push_back({c.chord.loc_b.t, ib});
  }

  // (ii) pairwise chord intersections; chords of one row are parallel.
  for (std::size_t p = 0; p < chords.size(); ++p) {
    for (std::size_t q = p + 1; q < chords.size(); ++q) {
      if (chords[p].row == chords[q].row) continue;
      const auto hit = segment_intersection(chords[p].chord.a, chords[p].chord.b, chords[q].chord.a,
                                            chords[q].chord.b);
      if (!hit) continue;
      const std::size_t id = index.insert(hit->point);
      chords[p].stops.push_back({std::clamp(hit->s, -1.0, 1.0), id});
      chords[q].stops.push_back({std::clamp(hit->t, -1.0, 1.0), id});
    }
  }

  // (iii) planar graph.
  std::set<std::pair<std::size_t, std::size_t>> edges;
  auto add_path = [&edges](std::vector<std::pair<double, std::size_t>>& stops) {
    std::sort(stops.begin(), stops.end());
    for (std::size_t k = 0; k + 1 < stops.size(); ++k) {
      const std::size_t u = stops[k].second, v = stops[k + 1].second;
      if (u != v) edges.insert({std::min(u, v), std::max(u, v)});
    }
  };
  for (auto& s : edge_stops) add_path(s);
  for (auto& c : chords) add_path(c.stops);

  // (iv) faces by traversal of angularly sorted half-edges.
  const auto& pts = index.points();
  const std::size_t n = pts.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(adj[v].begin(), adj[v].end(), [&](std::size_t a, std::size_t b) {
      const Vec2 da = pts[a] - pts[v], db = pts[b] - pts[v];
      return std::atan2(da.y, da.x) < std::atan2(db.y, db.x);
    });
  }
  std::unordered_set<std::uint64_t> visited;
  auto key = [n](std::size_t u, std::size_t v) { return static_cast<std::uint64_t>(u) * n + v; };
  std::vector<LinearRegion> out;
  bool valid = true;
  double area = 0.0;
  for (std::size_t u0 = 0; u0 < n && valid; ++u0) {
    for (const std::size_t v0 : adj[u0]) {
      if (visited.count(key(u0, v0))) continue;
      std::vector<Vec2> face;
      std::size_t u = u0, v = v0;
      for (std::size_t guard = 0; guard <= 2 * edges.size() + 2; ++guard) {
        visited.insert(key(u, v));
        face.push_back(pts[u]);
        const auto& around = adj[v];
        const auto it = std::find(around.begin(), around.end(), u);
        const std::size_t pos = static_cast<std::size_t>(it - around.begin());
        const std::size_t w = around[(pos + around.size() - 1) % around.size()];
        u = v;
        v = w;
        if (u == u0 && v == v0) break;
      }
      if (!(u == u0 && v == v0)) {
        valid = false;
        break;
      }
      if (signed_area(face) <= 0.0) continue;  // outer face or degenerate
      try {
        ConvexPolygon cell(face);
        area += cell.area();
        out.push_back(make_region_2d(std::move(cell), surrogate, region.W, region.b));
      } catch (const InvalidPolygon&) {
        // Faces too thin to survive cleaning carry no measurable area;
        // anything else means the embedding is inconsistent.
        if (std::abs(signed_area(face)) > 1e-12 * poly.area()) valid = false;
      }
    }
  }
  if (!valid || std::abs(area - poly.area()) > 1e-9 * poly.area()) {
    if (stats) ++stats->fallback_cuts;
    return cut_region_2d_sequential(region, surrogate);
  }
  return out;
}

// ---- meshes -----------------------------------------------------------------------

namespace {

std::string annotate(const std::exception& e, std::size_t layer) {
  return std::string(e.what()) + " (while cutting layer " + std::to_string(layer + 1) + ")";
}

template <class Cut>
std::vector<LinearRegion> run_layers(const NetworkParams& params, std::vector<LinearRegion> regions,
                                     const Cut& cut) {
  const std::size_t L = params.layers();
  for (std::size_t k = 0; k + 1 < L; ++k) {
    std::vector<LinearRegion> next;
    next.reserve(regions.size() * 2);
    for (const auto& r : regions) {
      LinearRegion pre{r.cell, params.weights[k] * r.W, params.weights[k] * r.b + params.biases[k]};
      try {
        for (auto& piece : cut(pre)) next.push_back(std::move(piece));
      } catch (const InvalidPolygon& e) {
        throw InvalidPolygon(annotate(e, k));
      } catch (const DomainError& e) {
        throw DomainError(annotate(e, k));
      }
    }
    regions = std::move(next);
  }
  for (auto& r : regions) {
    const Eigen::MatrixXd W = params.weights[L - 1] * r.W;
    const Eigen::VectorXd b = params.weights[L - 1] * r.b + params.biases[L - 1];
    r.W = W;
    r.b = b;
  }
  return regions;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
  if (v.size() % 2 == 1) return v[m];
  const double hi = v[m];
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m - 1), v.end());
  return 0.5 * (hi + v[m - 1]);
}

}  // namespace

std::vector<BoundaryRegion> boundary_mesh(const NetworkParams& params, const CpwlFunction& surrogate,
                                          const ConvexDomain& domain) {
  if (params.input_dim() != domain.dim()) {
    throw InvalidParameter("network input dimension does not match the domain");
  }
  std::vector<BoundaryRegion> out;
  if (domain.dim() == 1) {
    for (const auto& e : domain.boundary()) {
      BoundaryRegion r{e.a, e.a, e.normal, true, {}, {}};
      out.push_back(std::move(r));
    }
    return out;
  }
  for (const auto& e : domain.boundary()) {
    const Vec2 d = e.b - e.a;
    LinearRegion start{Segment1D(0.0, 1.0), Eigen::Matrix<double, 2, 1>(d.x, d.y),
                       Eigen::Vector2d(e.a.x, e.a.y)};
    const auto pieces = run_layers(params, {start}, [&](const LinearRegion& r) {
      return cut_region_1d(r, surrogate);
    });
    for (const auto& p : pieces) {
      const Segment1D& s = p.segment();
      out.push_back({e.a + d * s.lo, e.a + d * s.hi, e.normal, false, p.W, p.b});
    }
  }
  return out;
}

AdaptedMesh adaptive_mesh(const NetworkParams& params, const CpwlFunction& surrogate,
                          const ConvexDomain& domain) {
  const int d = domain.dim();
  if (params.input_dim() != d) {
    throw InvalidParameter("network input dimension does not match the domain");
  }
  AdaptedMesh mesh;
  mesh.dim = d;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
  if (d == 1) {
    for (const auto& s : domain.segments()) {
      auto cells = run_layers(params, {LinearRegion{s, I, zero}},
                              [&](const LinearRegion& r) { return cut_region_1d(r, surrogate); });
      for (auto& c : cells) mesh.domain_cells.push_back(std::move(c));
    }
  } else {
    for (const auto& p : domain.polygons()) {
      auto cells = run_layers(params, {LinearRegion{p, I, zero}}, [&](const LinearRegion& r) {
        return cut_region_2d(r, surrogate, &mesh.stats);
      });
      for (auto& c : cells) mesh.domain_cells.push_back(std::move(c));
    }
  }
  mesh.boundary_cells = boundary_mesh(params, surrogate, domain);
  std::vector<double> m;
  m.reserve(mesh.domain_cells.size());
  for (const auto& c : mesh.domain_cells) m.push_back(c.measure());
  mesh.median_measure = median(std::move(m));
  return mesh;
}

std::vector<QuadCell> quadrature_ready_cells(const AdaptedMesh& mesh) {
  std::vector<QuadCell> out;
  out.reserve(mesh.domain_cells.size() * 2);
  for (const auto& c : mesh.domain_cells) {
    if (c.dim() == 1) {
      out.push_back(make_segment_cell(c.segment().lo, c.segment().hi));
      continue;
    }
    for (const auto& piece : split_convex(c.polygon())) out.push_back(make_polygon_cell(piece));
  }
  return out;
}

}  // namespace aqnn
