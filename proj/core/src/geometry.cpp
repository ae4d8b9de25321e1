#include "aqnn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "aqnn/error.hpp"
#include "point_index.hpp"

namespace aqnn {
namespace {

constexpr double kSnap = 1e-9;

std::vector<Vec2> sub_polygon(const std::vector<Vec2>& v, std::initializer_list<int> one_based) {
  std::vector<Vec2> out;
  out.reserve(one_based.size());
  for (const int i : one_based) out.push_back(v[static_cast<std::size_t>(i - 1)]);
  return out;
}

bool point_in_triangle(Vec2 p, Vec2 a, Vec2 b, Vec2 c, double tol) {
  return cross(b - a, p - a) >= -tol && cross(c - b, p - b) >= -tol &&
         cross(a - c, p - c) >= -tol;
}

bool segments_cross(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1, double tol) {
  const double d1 = cross(a1 - a0, b0 - a0);
  const double d2 = cross(a1 - a0, b1 - a0);
  const double d3 = cross(b1 - b0, a0 - b0);
  const double d4 = cross(b1 - b0, a1 - b0);
  if (((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
      ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol))) {
    return true;
  }
  auto on_segment = [tol](Vec2 p, Vec2 q, Vec2 r, double d) {
    return std::abs(d) <= tol && std::min(p.x, q.x) - tol <= r.x && r.x <= std::max(p.x, q.x) + tol &&
           std::min(p.y, q.y) - tol <= r.y && r.y <= std::max(p.y, q.y) + tol;
  };
  return on_segment(a0, a1, b0, d1) || on_segment(a0, a1, b1, d2) ||
         on_segment(b0, b1, a0, d3) || on_segment(b0, b1, a1, d4);
}

}  // namespace

double signed_area(const std::vector<Vec2>& v) {
  double a = 0.0;
  const std::size_t n = v.size();
  if (n < 3) return 0.0;
  // Shift to the first vertex to limit cancellation.
  const Vec2 o = v[0];
  for (std::size_t i = 1; i + 1 < n; ++i) a += cross(v[i] - o, v[i + 1] - o);
  return 0.5 * a;
}

double diameter(const std::vector<Vec2>& v) {
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, norm(v[i] - v[j]));
  }
  return d;
}

std::vector<Vec2> clean_polygon(std::vector<Vec2> v) {
  const double scale = diameter(v);
  if (scale == 0.0) return {};
  const double snap = kSnap * scale;
  std::vector<Vec2> out;
  out.reserve(v.size());
  for (const Vec2 p : v) {
    if (!out.empty() && norm(p - out.back()) <= snap) continue;
    out.push_back(p);
  }
  while (out.size() > 1 && norm(out.front() - out.back()) <= snap) out.pop_back();
  bool changed = true;
  while (changed && out.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < out.size() && out.size() >= 3; ++i) {
      const Vec2 prev = out[(i + out.size() - 1) % out.size()];
      const Vec2 next = out[(i + 1) % out.size()];
      const Vec2 base = next - prev;
      const double len = norm(base);
      const double dist = len > 0.0 ? std::abs(cross(base, out[i] - prev)) / len : 0.0;
      if (dist <= 1e-11 * scale) {
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        --i;
      }
    }
  }
  if (out.size() < 3) return {};
  return out;
}

// ---- ConvexPolygon ---------------------------------------------------------------

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices) {
  vertices_ = clean_polygon(std::move(vertices));
  if (vertices_.size() < 3) throw InvalidPolygon("polygon has fewer than 3 distinct vertices");
  area_ = signed_area(vertices_);
  diameter_ = aqnn::diameter(vertices_);
  if (!(area_ > 0.0)) throw InvalidPolygon("polygon is not counter-clockwise or has zero area");
  const double tol = 1e-12 * diameter_ * diameter_;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices_[i], b = vertices_[(i + 1) % n], c = vertices_[(i + 2) % n];
    if (cross(b - a, c - b) < -tol) throw InvalidPolygon("polygon is not convex");
  }
}

Vec2 ConvexPolygon::centroid() const {
  const Vec2 o = vertices_[0];
  Vec2 acc{0.0, 0.0};
  double total = 0.0;
  for (std::size_t i = 1; i + 1 < vertices_.size(); ++i) {
    const Vec2 a = vertices_[i] - o, b = vertices_[i + 1] - o;
    const double w = cross(a, b);
    acc = acc + (a + b) * w;
    total += w;
  }
  return o + acc / (3.0 * total);
}

bool ConvexPolygon::contains(Vec2 p, double tol) const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices_[i], b = vertices_[(i + 1) % n];
    if (cross(b - a, p - a) < -tol * diameter_ * norm(b - a)) return false;
  }
  return true;
}

// ---- SimplePolygon ----------------------------------------------------------------

SimplePolygon::SimplePolygon(std::vector<Vec2> vertices) {
  vertices_ = clean_polygon(std::move(vertices));
  if (vertices_.size() < 3) throw InvalidPolygon("polygon has fewer than 3 distinct vertices");
  const double scale = aqnn::diameter(vertices_);
  const double tol = 1e-12 * scale * scale;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_cross(vertices_[i], vertices_[(i + 1) % n], vertices_[j], vertices_[(j + 1) % n],
                         tol)) {
        throw SelfIntersectingPolygon("polygon edges " + std::to_string(i) + " and " +
                                      std::to_string(j) + " intersect");
      }
    }
  }
  area_ = signed_area(vertices_);
  if (!(area_ > 0.0)) throw InvalidPolygon("polygon is not counter-clockwise or has zero area");
}

bool SimplePolygon::is_convex() const {
  const std::size_t n = vertices_.size();
  const double scale = aqnn::diameter(vertices_);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices_[i], b = vertices_[(i + 1) % n], c = vertices_[(i + 2) % n];
    if (cross(b - a, c - b) < -1e-12 * scale * scale) return false;
  }
  return true;
}

bool SimplePolygon::contains(Vec2 p) const {
  bool inside = false;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = vertices_[i], b = vertices_[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

Segment1D::Segment1D(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!(lo < hi)) throw InvalidPolygon("segment endpoints must satisfy lo < hi");
}

// ---- clipping and intersection ----------------------------------------------------

std::optional<Chord> clip_line(const ConvexPolygon& poly, Vec2 w, double c) {
  const double wn = norm(w);
  if (!(wn > 0.0)) return std::nullopt;
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  const double tol = kSnap * poly.diameter();
  std::vector<double> s(n);
  std::vector<int> cls(n);
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = (dot(w, v[i]) - c) / wn;  // signed distance
    cls[i] = s[i] > tol ? 1 : (s[i] < -tol ? -1 : 0);
    pos |= cls[i] > 0;
    neg |= cls[i] < 0;
  }
  if (!pos || !neg) return std::nullopt;
  std::vector<std::pair<Vec2, BoundaryLocation>> hits;
  for (std::size_t i = 0; i < n && hits.size() < 2; ++i) {
    const std::size_t j = (i + 1) % n;
    if (cls[i] == 0) {
      hits.push_back({v[i], {i, 0.0}});
    } else if (cls[j] != 0 && cls[i] != cls[j]) {
      const double t = s[i] / (s[i] - s[j]);
      hits.push_back({v[i] + (v[j] - v[i]) * t, {i, t}});
    }
  }
  if (hits.size() < 2) return std::nullopt;
  return Chord{hits[0].first, hits[1].first, hits[0].second, hits[1].second};
}

std::optional<SegmentHit> segment_intersection(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  const Vec2 pa = (a0 + a1) * 0.5, da = (a1 - a0) * 0.5;
  const Vec2 pb = (b0 + b1) * 0.5, db = (b1 - b0) * 0.5;
  const double det = cross(da, db);
  if (std::abs(det) < 1e-12 * norm(da) * norm(db) || det == 0.0) return std::nullopt;
  const Vec2 r = pb - pa;
  const double s = cross(r, db) / det;
  const double t = cross(r, da) / det;
  constexpr double kLimit = 1.0 + 1e-9;
  if (std::abs(s) > kLimit || std::abs(t) > kLimit) return std::nullopt;
  return SegmentHit{pa + da * s, s, t};
}

std::pair<std::optional<ConvexPolygon>, std::optional<ConvexPolygon>> split_by_line(
    const ConvexPolygon& poly, Vec2 w, double c) {
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  const double wn = norm(w);
  const double tol = kSnap * poly.diameter();
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = (dot(w, v[i]) - c) / wn;
    if (std::abs(s[i]) <= tol) s[i] = 0.0;
  }
  std::vector<Vec2> below, above;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    if (s[i] <= 0.0) below.push_back(v[i]);
    if (s[i] >= 0.0) above.push_back(v[i]);
    if ((s[i] < 0.0 && s[j] > 0.0) || (s[i] > 0.0 && s[j] < 0.0)) {
      const Vec2 p = v[i] + (v[j] - v[i]) * (s[i] / (s[i] - s[j]));
      below.push_back(p);
      above.push_back(p);
    }
  }
  auto build = [](std::vector<Vec2> pts) -> std::optional<ConvexPolygon> {
    if (pts.size() < 3) return std::nullopt;
    try {
      return ConvexPolygon(std::move(pts));
    } catch (const InvalidPolygon&) {
      return std::nullopt;
    }
  };
  return {build(std::move(below)), build(std::move(above))};
}

// ---- decompositions ----------------------------------------------------------------

std::vector<ConvexPolygon> split_convex(const ConvexPolygon& poly) {
  const auto& v = poly.vertices();
  const int n = static_cast<int>(v.size());
  std::vector<std::vector<Vec2>> parts;
  switch (n) {
    case 3:
    case 4:
      return {poly};
    case 5:
      parts = {sub_polygon(v, {1, 2, 3}), sub_polygon(v, {3, 4, 5, 1})};
      break;
    case 6:
      parts = {sub_polygon(v, {1, 2, 3, 4}), sub_polygon(v, {4, 5, 6, 1})};
      break;
    case 7:
      parts = {sub_polygon(v, {1, 2, 3, 4}), sub_polygon(v, {4, 5, 6, 7}), sub_polygon(v, {7, 1, 4})};
      break;
    case 8:
      parts = {sub_polygon(v, {1, 2, 3, 4}), sub_polygon(v, {4, 5, 6, 7}),
               sub_polygon(v, {7, 8, 1, 4})};
      break;
    case 9:
      parts = {sub_polygon(v, {1, 2, 3, 4}), sub_polygon(v, {4, 5, 6, 7}),
               sub_polygon(v, {7, 8, 9, 1}), sub_polygon(v, {1, 4, 7})};
      break;
    case 10:
      parts = {sub_polygon(v, {1, 2, 3, 4}), sub_polygon(v, {4, 5, 6, 7}),
               sub_polygon(v, {7, 8, 9, 10}), sub_polygon(v, {10, 1, 4, 7})};
      break;
    default: {
      const int half = n / 2;  // diagonal between vertices 1 and half + 1
      std::vector<Vec2> a(v.begin(), v.begin() + half + 1);
      std::vector<Vec2> b(v.begin() + half, v.end());
      b.push_back(v[0]);
      parts = {std::move(a), std::move(b)};
    }
  }
  std::vector<ConvexPolygon> out;
  for (auto& p : parts) {
    std::optional<ConvexPolygon> piece;
    try {
      piece.emplace(std::move(p));
    } catch (const InvalidPolygon&) {
      continue;  // sliver collapsed by vertex cleaning
    }
    if (piece->size() <= 4) {
      out.push_back(std::move(*piece));
    } else {
      for (auto& q : split_convex(*piece)) out.push_back(std::move(q));
    }
  }
  return out;
}

namespace {

// Triangles of the ear-clipped polygon as vertex index triples.
std::vector<std::array<std::size_t, 3>> ear_clip_indices(const std::vector<Vec2>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const double scale = diameter(v);
  const double tol = 1e-14 * scale * scale;
  std::vector<std::array<std::size_t, 3>> tris;
  while (idx.size() > 3) {
    const std::size_t m = idx.size();
    std::size_t best = m;
    for (std::size_t k = 0; k < m; ++k) {
      const Vec2 a = v[idx[(k + m - 1) % m]], b = v[idx[k]], c = v[idx[(k + 1) % m]];
      const double cr = cross(b - a, c - b);
      if (cr <= tol) continue;
      bool ear = true;
      for (std::size_t q = 0; q < m && ear; ++q) {
        if (q == k || q == (k + 1) % m || q == (k + m - 1) % m) continue;
        const Vec2 p = v[idx[q]];
        if (p == a || p == b || p == c) continue;
        if (point_in_triangle(p, a, b, c, tol)) ear = false;
      }
      if (ear) {
        best = k;
        break;
      }
    }
    if (best == m) {
      // Numerically no clean ear; clip the most convex corner.
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < m; ++k) {
        const Vec2 a = v[idx[(k + m - 1) % m]], b = v[idx[k]], c = v[idx[(k + 1) % m]];
        const double cr = cross(b - a, c - b);
        if (cr > top) {
          top = cr;
          best = k;
        }
      }
    }
    tris.push_back({idx[(best + m - 1) % m], idx[best], idx[(best + 1) % m]});
    idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(best));
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

}  // namespace

std::vector<ConvexPolygon> ear_clip(const SimplePolygon& poly) {
  const auto& v = poly.vertices();
  std::vector<ConvexPolygon> out;
  for (const auto& t : ear_clip_indices(v)) {
    try {
      out.emplace_back(std::vector<Vec2>{v[t[0]], v[t[1]], v[t[2]]});
    } catch (const InvalidPolygon&) {
      // zero-area ear from collinear remaining vertices
    }
  }
  return out;
}

std::vector<ConvexPolygon> ear_clip(const std::vector<Vec2>& vertices) {
  return ear_clip(SimplePolygon(vertices));
}

std::vector<ConvexPolygon> convex_decomposition(const SimplePolygon& poly) {
  const auto& v = poly.vertices();
  if (poly.is_convex()) return {ConvexPolygon(v)};
  std::vector<std::vector<std::size_t>> pieces;
  for (const auto& t : ear_clip_indices(v)) pieces.push_back({t[0], t[1], t[2]});
  const double scale = diameter(v);
  const double tol = 1e-12 * scale * scale;
  auto convex = [&](const std::vector<std::size_t>& p) {
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = v[p[i]], b = v[p[(i + 1) % n]], c = v[p[(i + 2) % n]];
      if (cross(b - a, c - b) < -tol) return false;
    }
    return true;
  };
  // Remove diagonals greedily while both sides stay convex.
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t a = 0; a < pieces.size() && !merged; ++a) {
      for (std::size_t b = a + 1; b < pieces.size() && !merged; ++b) {
        const auto& pa = pieces[a];
        const auto& pb = pieces[b];
        for (std::size_t i = 0; i < pa.size() && !merged; ++i) {
          const std::size_t u = pa[i], w = pa[(i + 1) % pa.size()];
          for (std::size_t j = 0; j < pb.size(); ++j) {
            if (pb[j] != w || pb[(j + 1) % pb.size()] != u) continue;
            // pa: ... u w ...; pb: ... w u ...; splice pb's path u -> w into pa.
            std::vector<std::size_t> joined;
            for (std::size_t k = 0; k <= i; ++k) joined.push_back(pa[k]);
            for (std::size_t k = 2; k < pb.size(); ++k) joined.push_back(pb[(j + k) % pb.size()]);
            for (std::size_t k = i + 1; k < pa.size(); ++k) joined.push_back(pa[k]);
            if (convex(joined)) {
              pieces[a] = std::move(joined);
              pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(b));
              merged = true;
            }
            break;
          }
        }
      }
    }
  }
  std::vector<ConvexPolygon> out;
  for (const auto& p : pieces) {
    std::vector<Vec2> pts;
    for (const std::size_t i : p) pts.push_back(v[i]);
    try {
      out.emplace_back(std::move(pts));
    } catch (const InvalidPolygon&) {
    }
  }
  return out;
}

// ---- unions --------------------------------------------------------------------------

std::vector<std::vector<Vec2>> union_boundary(const std::vector<std::vector<Vec2>>& polygons,
                                              double tol) {
  detail::PointIndex index(tol);
  std::vector<std::vector<std::size_t>> loops;
  for (const auto& poly : polygons) {
    std::vector<std::size_t> ids;
    for (const Vec2 p : poly) {
      const std::size_t id = index.insert(p);
      if (ids.empty() || ids.back() != id) ids.push_back(id);
    }
    while (ids.size() > 1 && ids.front() == ids.back()) ids.pop_back();
    loops.push_back(std::move(ids));
  }
  const auto& pts = index.points();
  // Directed edges, split at every vertex lying in their interior.
  std::map<std::pair<std::size_t, std::size_t>, int> edges;
  for (const auto& ids : loops) {
    const std::size_t n = ids.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = ids[i], b = ids[(i + 1) % n];
      const Vec2 pa = pts[a], pb = pts[b];
      const Vec2 d = pb - pa;
      const double len2 = dot(d, d);
      std::vector<std::pair<double, std::size_t>> inner;
      for (std::size_t q = 0; q < pts.size(); ++q) {
        if (q == a || q == b) continue;
        const Vec2 r = pts[q] - pa;
        const double t = dot(r, d) / len2;
        if (t <= 0.0 || t >= 1.0) continue;
        if (std::abs(cross(d, r)) / std::sqrt(len2) > tol) continue;
        inner.push_back({t, q});
      }
      std::sort(inner.begin(), inner.end());
      std::size_t prev = a;
      for (const auto& [t, q] : inner) {
        ++edges[{prev, q}];
        prev = q;
      }
      ++edges[{prev, b}];
    }
  }
  // Cancel opposite pairs.
  std::map<std::size_t, std::vector<std::size_t>> out_edges;
  for (const auto& [e, count] : edges) {
    const auto rev = edges.find({e.second, e.first});
    const int remaining = count - (rev == edges.end() ? 0 : rev->second);
    if (remaining < 0) continue;
    if (remaining > 1) return {};
    if (remaining == 1) out_edges[e.first].push_back(e.second);
  }
  for (const auto& [from, tos] : out_edges) {
    if (tos.size() != 1) return {};
  }
  std::vector<std::vector<Vec2>> result;
  std::map<std::size_t, bool> used;
  for (const auto& [start, tos] : out_edges) {
    if (used[start]) continue;
    std::vector<Vec2> loop;
    std::size_t cur = start;
    while (!used[cur]) {
      used[cur] = true;
      loop.push_back(pts[cur]);
      const auto it = out_edges.find(cur);
      if (it == out_edges.end()) return {};
      cur = it->second.front();
    }
    if (cur != start) return {};
    result.push_back(std::move(loop));
  }
  return result;
}

double shared_boundary_length(const std::vector<Vec2>& a, const std::vector<Vec2>& b, double tol) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec2 a0 = a[i], a1 = a[(i + 1) % a.size()];
    const Vec2 d = a1 - a0;
    const double len = norm(d);
    if (len == 0.0) continue;
    const Vec2 u = d / len;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const Vec2 b0 = b[j], b1 = b[(j + 1) % b.size()];
      if (std::abs(cross(u, b0 - a0)) > tol || std::abs(cross(u, b1 - a0)) > tol) continue;
      double t0 = dot(b0 - a0, u), t1 = dot(b1 - a0, u);
      if (t0 > t1) std::swap(t0, t1);
      const double overlap = std::min(len, t1) - std::max(0.0, t0);
      if (overlap > tol) total += overlap;
    }
  }
  return total;
}

SimplePolygon merge_adjacent(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  const double tol = kSnap * std::max(diameter(a), diameter(b));
  if (shared_boundary_length(a, b, tol) <= tol) {
    throw InvalidPolygon("polygons share no boundary of positive length");
  }
  const auto loops = union_boundary({a, b}, tol);
  if (loops.size() != 1) throw InvalidPolygon("union of the polygons is not a simple polygon");
  return SimplePolygon(loops.front());
}

}  // namespace aqnn
