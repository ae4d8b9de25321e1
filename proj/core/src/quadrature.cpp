#include "aqnn/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "aqnn/error.hpp"
#include "triangle_rules.hpp"

namespace aqnn {
namespace {

constexpr int kMaxGauss = 64;

std::vector<GaussNode> compute_gauss_legendre(int n) {
  std::vector<GaussNode> nodes(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = {-x, w};
    nodes[n - 1 - i] = {x, w};
  }
  if (n % 2 == 1) nodes[n / 2].x = 0.0;
  return nodes;
}

QuadratureRule build_rule(Shape shape, int order) {
  QuadratureRule r{shape, order, {}, {}};
  switch (shape) {
    case Shape::Segment: {
      for (const auto& n : gauss_legendre((order + 2) / 2)) {
        r.points.push_back({n.x, 0.0});
        r.weights.push_back(n.w);
      }
      break;
    }
    case Shape::Triangle: {
      for (const auto& n : detail::witherden_vincent_triangle(order)) {
        r.points.push_back({n.x, n.y});
        r.weights.push_back(n.w);
      }
      break;
    }
    case Shape::Quadrangle: {
      // Exact for degree `order` pulled back through any bilinear map.
      const auto g = gauss_legendre((order + 3) / 2);
      for (const auto& a : g) {
        for (const auto& b : g) {
          r.points.push_back({a.x, b.x});
          r.weights.push_back(a.w * b.w);
        }
      }
      break;
    }
  }
  return r;
}

}  // namespace

std::span<const GaussNode> gauss_legendre(int n) {
  static const auto table = [] {
    std::array<std::vector<GaussNode>, kMaxGauss + 1> t;
    for (int k = 1; k <= kMaxGauss; ++k) t[k] = compute_gauss_legendre(k);
    return t;
  }();
  if (n < 1 || n > kMaxGauss) throw InvalidParameter("Gauss-Legendre size out of range");
  return table[n];
}

const QuadratureRule& rule(Shape shape, int order) {
  static const auto table = [] {
    std::array<std::array<QuadratureRule, kMaxOrder + 1>, 3> t;
    for (int s = 0; s < 3; ++s) {
      for (int o = 1; o <= kMaxOrder; ++o) t[s][o] = build_rule(static_cast<Shape>(s), o);
    }
    return t;
  }();
  if (order < 1 || order > kMaxOrder) {
    throw UnsupportedOrder("quadrature order " + std::to_string(order) + " outside [1, " +
                           std::to_string(kMaxOrder) + "]");
  }
  return table[static_cast<int>(shape)][order];
}

double reference_measure(Shape shape) {
  switch (shape) {
    case Shape::Segment: return 2.0;
    case Shape::Triangle: return 0.5;
    case Shape::Quadrangle: return 4.0;
  }
  return 0.0;
}

QuadCell make_segment_cell(double lo, double hi) {
  return {Shape::Segment, {{lo, 0.0}, {hi, 0.0}}, hi - lo};
}

QuadCell make_polygon_cell(const ConvexPolygon& poly) {
  if (poly.size() == 3) return {Shape::Triangle, poly.vertices(), poly.area()};
  if (poly.size() == 4) return {Shape::Quadrangle, poly.vertices(), poly.area()};
  throw InvalidParameter("integration cells must be triangles or quadrangles");
}

void map_rule(const QuadratureRule& r, const QuadCell& cell, MappedPoints& out) {
  if (r.shape != cell.shape) throw InvalidParameter("rule shape does not match cell shape");
  const auto& v = cell.vertices;
  const std::size_t n = r.points.size();
  switch (cell.shape) {
    case Shape::Segment: {
      const Vec2 mid = (v[0] + v[1]) * 0.5, half = (v[1] - v[0]) * 0.5;
      const double jac = norm(half);
      if (!(jac > 0.0)) throw DegenerateCell("segment cell has zero length");
      for (std::size_t i = 0; i < n; ++i) {
        out.points.push_back(mid + half * r.points[i].x);
        out.weights.push_back(r.weights[i] * jac);
      }
      return;
    }
    case Shape::Triangle: {
      const Vec2 e1 = v[1] - v[0], e2 = v[2] - v[0];
      const double jac = cross(e1, e2);
      if (!(jac > 0.0)) throw DegenerateCell("triangle cell has non-positive area");
      for (std::size_t i = 0; i < n; ++i) {
        out.points.push_back(v[0] + e1 * r.points[i].x + e2 * r.points[i].y);
        out.weights.push_back(r.weights[i] * jac);
      }
      return;
    }
    case Shape::Quadrangle: {
      for (std::size_t i = 0; i < n; ++i) {
        const double xi = r.points[i].x, eta = r.points[i].y;
        const Vec2 p = (v[0] * ((1 - xi) * (1 - eta)) + v[1] * ((1 + xi) * (1 - eta)) +
                        v[2] * ((1 + xi) * (1 + eta)) + v[3] * ((1 - xi) * (1 + eta))) *
                       0.25;
        const Vec2 dxi = ((v[1] - v[0]) * (1 - eta) + (v[2] - v[3]) * (1 + eta)) * 0.25;
        const Vec2 deta = ((v[3] - v[0]) * (1 - xi) + (v[2] - v[1]) * (1 + xi)) * 0.25;
        const double jac = cross(dxi, deta);
        if (!(jac > 0.0)) throw DegenerateCell("quadrangle cell has non-positive Jacobian");
        out.points.push_back(p);
        out.weights.push_back(r.weights[i] * jac);
      }
      return;
    }
  }
}

MappedPoints map_rule(const QuadratureRule& r, const QuadCell& cell) {
  MappedPoints out;
  map_rule(r, cell, out);
  return out;
}

double integrate(const std::function<double(Vec2)>& f, std::span<const QuadCell> cells,
                 int order) {
  double total = 0.0;
  MappedPoints buf;
  for (const auto& c : cells) {
    buf.points.clear();
    buf.weights.clear();
    map_rule(rule(c.shape, order), c, buf);
    for (std::size_t i = 0; i < buf.points.size(); ++i) total += buf.weights[i] * f(buf.points[i]);
  }
  return total;
}

}  // namespace aqnn
