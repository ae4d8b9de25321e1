#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "aqnn/error.hpp"
#include "aqnn/geometry.hpp"
#include "oracles.hpp"

using aqnn::ConvexPolygon;
using aqnn::SimplePolygon;
using aqnn::Vec2;

namespace {

ConvexPolygon square() { return ConvexPolygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}); }

std::vector<Vec2> regular(int n, double r = 1.0) {
  std::vector<Vec2> v;
  for (int i = 0; i < n; ++i) {
    const double t = 2 * M_PI * i / n;
    v.push_back({r * std::cos(t), r * std::sin(t)});
  }
  return v;
}

double shoelace(const std::vector<Vec2>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[i], b = v[(i + 1) % v.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

bool is_convex_ccw(const std::vector<Vec2>& v) {
  double scale = 0.0;
  for (const Vec2 p : v) scale = std::max(scale, std::hypot(p.x, p.y));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[i], b = v[(i + 1) % v.size()], c = v[(i + 2) % v.size()];
    if (aqnn::cross(b - a, c - b) < -1e-12 * scale * scale) return false;
  }
  return shoelace(v) > 0;
}

// Random convex polygon: sorted angles on a jittered ellipse.
std::vector<Vec2> random_convex(std::mt19937_64& rng, int n) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(oracle::uniform(rng, 0, 2 * M_PI));
  std::sort(t.begin(), t.end());
  const double a = oracle::uniform(rng, 0.5, 2), b = oracle::uniform(rng, 0.5, 2);
  const Vec2 c{oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1)};
  std::vector<Vec2> v;
  for (double s : t) v.push_back(c + Vec2{a * std::cos(s), b * std::sin(s)});
  return v;
}

double area_sum(const std::vector<ConvexPolygon>& parts) {
  double s = 0.0;
  for (const auto& p : parts) s += p.area();
  return s;
}

}  // namespace

TEST(Geometry, AreaAndContains) {
  EXPECT_DOUBLE_EQ(square().area(), 4.0);
  EXPECT_FALSE(square().contains({2, 0}));
  EXPECT_TRUE(square().contains({0.3, -0.9}));
  EXPECT_TRUE(square().contains({1, 0}));
}

TEST(Geometry, ConvexPolygonRejectsBadInput) {
  EXPECT_THROW(ConvexPolygon({{0, 0}, {1, 0}}), aqnn::InvalidPolygon);
  EXPECT_THROW(ConvexPolygon({{0, 0}, {2, 0}, {1, 0.2}, {2, 2}, {0, 2}}), aqnn::InvalidPolygon);
  EXPECT_THROW(ConvexPolygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), aqnn::InvalidPolygon);
}

TEST(Geometry, CleanDropsDuplicatesAndCollinear) {
  const ConvexPolygon p({{0, 0}, {1, 0}, {1, 1e-14}, {2, 0}, {2, 2}, {0, 2}});
  EXPECT_EQ(p.size(), 4u);
  EXPECT_NEAR(p.area(), 4.0, 1e-12);
}

TEST(Geometry, ClipLine) {
  const auto c = aqnn::clip_line(square(), {1, 0}, 0.5);
  ASSERT_TRUE(c.has_value());
  const Vec2 lo = c->a.y < c->b.y ? c->a : c->b;
  const Vec2 hi = c->a.y < c->b.y ? c->b : c->a;
  EXPECT_NEAR(lo.x, 0.5, 1e-15);
  EXPECT_NEAR(lo.y, -1.0, 1e-15);
  EXPECT_NEAR(hi.x, 0.5, 1e-15);
  EXPECT_NEAR(hi.y, 1.0, 1e-15);
  EXPECT_FALSE(aqnn::clip_line(square(), {1, 0}, 3.0).has_value());
  EXPECT_FALSE(aqnn::clip_line(square(), {0, 1}, 1.0).has_value());
  EXPECT_FALSE(aqnn::clip_line(square(), {1, 1}, 2.0).has_value());  // touches a corner
}

TEST(Geometry, ClipLineEndpointsOnBoundaryAndLine) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const ConvexPolygon p(random_convex(rng, 7));
    const Vec2 w{oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1)};
    const double c = aqnn::dot(w, p.centroid()) + oracle::uniform(rng, -0.5, 0.5);
    const auto chord = aqnn::clip_line(p, w, c);
    if (!chord) continue;
    const double scale = p.diameter();
    for (const auto& [q, loc] : {std::pair{chord->a, chord->loc_a}, std::pair{chord->b, chord->loc_b}}) {
      EXPECT_NEAR(aqnn::dot(w, q), c, 1e-9 * scale);
      const Vec2 e0 = p[loc.edge], e1 = p[(loc.edge + 1) % p.size()];
      const Vec2 on = e0 + loc.t * (e1 - e0);
      EXPECT_NEAR(on.x, q.x, 1e-9 * scale);
      EXPECT_NEAR(on.y, q.y, 1e-9 * scale);
    }
  }
}

TEST(Geometry, SegmentIntersection) {
  const auto h = aqnn::segment_intersection({-1, 0}, {1, 0}, {0, -1}, {0, 1});
  ASSERT_TRUE(h.has_value());
  EXPECT_NEAR(h->point.x, 0.0, 1e-15);
  EXPECT_NEAR(h->point.y, 0.0, 1e-15);
  EXPECT_FALSE(aqnn::segment_intersection({-1, 0}, {1, 0}, {-1, 1}, {1, 1}).has_value());
  const auto d = aqnn::segment_intersection({-1, -1}, {1, 1}, {-1, 1}, {1, -1});
  ASSERT_TRUE(d.has_value());
  EXPECT_NEAR(d->s, 0.0, 1e-15);
  EXPECT_NEAR(d->t, 0.0, 1e-15);
  // Lines meet outside both segments.
  EXPECT_FALSE(aqnn::segment_intersection({0, 0}, {1, 0}, {3, -1}, {3, 1}).has_value());
  const auto end = aqnn::segment_intersection({0, 0}, {2, 0}, {2, -1}, {2, 1});
  ASSERT_TRUE(end.has_value());
  EXPECT_NEAR(end->s, 1.0, 1e-15);
}

TEST(Geometry, SplitByLine) {
  const auto [left, right] = aqnn::split_by_line(square(), {1, 0}, 0.25);
  ASSERT_TRUE(left && right);
  EXPECT_NEAR(left->area(), 2.5, 1e-14);
  EXPECT_NEAR(right->area(), 1.5, 1e-14);
  const auto [none, all] = aqnn::split_by_line(square(), {1, 0}, -5.0);
  EXPECT_FALSE(none.has_value());
  ASSERT_TRUE(all.has_value());
  EXPECT_NEAR(all->area(), 4.0, 1e-14);
}

TEST(Geometry, SplitConvexSmallCases) {
  const ConvexPolygon tri({{0, 0}, {1, 0}, {0, 1}});
  const auto t = aqnn::split_convex(tri);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].vertices(), tri.vertices());

  const ConvexPolygon pent(regular(5));
  const auto p = aqnn::split_convex(pent);
  ASSERT_EQ(p.size(), 2u);
  std::vector<std::size_t> sizes{p[0].size(), p[1].size()};
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 4}));
  EXPECT_NEAR(area_sum(p), shoelace(regular(5)), 1e-14);
}

TEST(Geometry, SplitConvexOctagonFollowsCycles) {
  const auto v = regular(8);
  const auto parts = aqnn::split_convex(ConvexPolygon(v));
  // Cycles (1,2,3,4), (4,5,6,7), (7,8,1,4) in 1-based vertex numbering.
  const std::vector<std::vector<int>> cycles{{0, 1, 2, 3}, {3, 4, 5, 6}, {6, 7, 0, 3}};
  ASSERT_EQ(parts.size(), cycles.size());
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    std::vector<Vec2> expect;
    for (int k : cycles[i]) expect.push_back(v[k]);
    EXPECT_NEAR(parts[i].area(), shoelace(expect), 1e-14) << i;
    for (const Vec2 q : expect) {
      const auto& pv = parts[i].vertices();
      EXPECT_TRUE(std::any_of(pv.begin(), pv.end(), [&](Vec2 r) { return aqnn::norm(r - q) < 1e-14; }));
    }
  }
  EXPECT_NEAR(area_sum(parts), shoelace(v), 1e-13);
}

TEST(Geometry, SplitConvexLargePolygons) {
  for (int n : {9, 10, 11, 14, 23}) {
    const auto v = regular(n, 1.3);
    const auto parts = aqnn::split_convex(ConvexPolygon(v));
    EXPECT_NEAR(area_sum(parts), shoelace(v), 1e-10 * shoelace(v)) << n;
    for (const auto& p : parts) {
      EXPECT_LE(p.size(), 4u);
      EXPECT_TRUE(is_convex_ccw(p.vertices()));
    }
  }
}

TEST(Geometry, SplitConvexRandomAreas) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const int n = 5 + static_cast<int>(rng() % 8);
    const ConvexPolygon poly(random_convex(rng, n));
    const auto parts = aqnn::split_convex(poly);
    EXPECT_NEAR(area_sum(parts), poly.area(), 1e-10 * poly.area());
    for (const auto& p : parts) EXPECT_TRUE(is_convex_ccw(p.vertices()));
  }
}

TEST(Geometry, EarClip) {
  const auto pent = aqnn::ear_clip(SimplePolygon(regular(5)));
  EXPECT_EQ(pent.size(), 3u);
  const std::vector<Vec2> tri{{0, 0}, {1, 0}, {0, 1}};
  const auto t = aqnn::ear_clip(SimplePolygon(tri));
  ASSERT_EQ(t.size(), 1u);
  EXPECT_NEAR(t[0].area(), 0.5, 1e-15);
}

TEST(Geometry, EarClipLShape) {
  const std::vector<Vec2> l{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  const auto tris = aqnn::ear_clip(SimplePolygon(l));
  ASSERT_EQ(tris.size(), 4u);
  EXPECT_NEAR(area_sum(tris), 3.0, 1e-14);
  // Every grid point of the L lies in exactly one triangle (away from edges).
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 40; ++j) {
      const Vec2 p{0.013 + 0.05 * i, 0.017 + 0.05 * j};
      const bool inside = p.x < 2 && p.y < 2 && (p.x < 1 || p.y < 1);
      int hits = 0;
      for (const auto& t : tris) hits += t.contains(p, 0.0);
      EXPECT_EQ(hits, inside ? 1 : 0) << p.x << "," << p.y;
    }
  }
}

TEST(Geometry, EarClipRejectsSelfIntersection) {
  const std::vector<Vec2> bow{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  EXPECT_THROW(aqnn::ear_clip(bow), aqnn::SelfIntersectingPolygon);
}

TEST(Geometry, ConvexDecomposition) {
  const std::vector<Vec2> l{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  const auto parts = aqnn::convex_decomposition(SimplePolygon(l));
  EXPECT_EQ(parts.size(), 2u);
  EXPECT_NEAR(area_sum(parts), 3.0, 1e-14);
  for (const auto& p : parts) EXPECT_TRUE(is_convex_ccw(p.vertices()));
}

TEST(Geometry, MergeAdjacentSquares) {
  const std::vector<Vec2> a{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const std::vector<Vec2> b{{1, 0}, {2, 0}, {2, 1}, {1, 1}};
  const auto m = aqnn::merge_adjacent(a, b);
  EXPECT_NEAR(m.area(), 2.0, 1e-15);
  EXPECT_TRUE(m.is_convex());
  EXPECT_NEAR(aqnn::shared_boundary_length(a, b, 1e-12), 1.0, 1e-15);
  const std::vector<Vec2> far{{5, 5}, {6, 5}, {6, 6}, {5, 6}};
  EXPECT_THROW(aqnn::merge_adjacent(a, far), aqnn::InvalidPolygon);
}

TEST(Geometry, UnionBoundaryWithPartialEdgeOverlap) {
  // Two small squares stacked against one large square: edges overlap partially.
  const std::vector<Vec2> big{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  const std::vector<Vec2> s1{{2, 0}, {3, 0}, {3, 1}, {2, 1}};
  const std::vector<Vec2> s2{{2, 1}, {3, 1}, {3, 2}, {2, 2}};
  const auto loops = aqnn::union_boundary({big, s1, s2}, 1e-12);
  ASSERT_EQ(loops.size(), 1u);
  EXPECT_NEAR(shoelace(loops[0]), 6.0, 1e-14);
}

TEST(Geometry, Segment1D) {
  const aqnn::Segment1D s(-1, 3);
  EXPECT_EQ(s.length(), 4.0);
  EXPECT_EQ(s.midpoint(), 1.0);
  EXPECT_THROW(aqnn::Segment1D(1, 1), aqnn::InvalidPolygon);
}
