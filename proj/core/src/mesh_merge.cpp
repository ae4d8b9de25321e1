#include <algorithm>
#include <limits>
#include <numeric>

#include "aqnn/error.hpp"
#include "aqnn/mesh.hpp"

namespace aqnn {
namespace {

struct Box {
  double x0, y0, x1, y1;

  bool touches(const Box& o, double tol) const {
    return x0 <= o.x1 + tol && o.x0 <= x1 + tol && y0 <= o.y1 + tol && o.y0 <= y1 + tol;
  }
};

Box bounding_box(const std::vector<Vec2>& pts) {
  Box b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Vec2 p : pts) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

struct Aggregate {
  std::vector<std::size_t> members;
  std::vector<Vec2> loop;
  Box box;
  double measure;
  bool alive = true;
  bool stuck = false;
};

void merge_2d(const AdaptedMesh& mesh, double threshold, AdaptedMesh& out) {
  const auto& cells = mesh.domain_cells;
  std::vector<Vec2> all;
  std::vector<Aggregate> aggs;
  aggs.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& v = cells[i].polygon().vertices();
    all.insert(all.end(), v.begin(), v.end());
    aggs.push_back({{i}, v, bounding_box(v), cells[i].measure()});
  }
  const double tol = 1e-10 * (all.empty() ? 1.0 : diameter(all));

  for (;;) {
    std::size_t pick = aggs.size();
    for (std::size_t i = 0; i < aggs.size(); ++i) {
      const auto& a = aggs[i];
      if (!a.alive || a.stuck || a.measure >= threshold) continue;
      if (pick == aggs.size() || a.measure < aggs[pick].measure) pick = i;
    }
    if (pick == aggs.size()) break;

    std::vector<std::size_t> neighbours;
    for (std::size_t j = 0; j < aggs.size(); ++j) {
      if (j == pick || !aggs[j].alive || !aggs[pick].box.touches(aggs[j].box, tol)) continue;
      if (shared_boundary_length(aggs[pick].loop, aggs[j].loop, tol) > tol) neighbours.push_back(j);
    }
    std::sort(neighbours.begin(), neighbours.end(),
              [&](std::size_t a, std::size_t b) { return aggs[a].measure > aggs[b].measure; });
    bool merged = false;
    for (const std::size_t j : neighbours) {
      const auto loops = union_boundary({aggs[j].loop, aggs[pick].loop}, tol);
      if (loops.size() != 1) continue;
      Aggregate& into = aggs[j];
      into.members.insert(into.members.end(), aggs[pick].members.begin(), aggs[pick].members.end());
      into.loop = loops.front();
      into.box = bounding_box(into.loop);
      into.measure += aggs[pick].measure;
      into.stuck = false;
      aggs[pick].alive = false;
      ++out.stats.merged_cells;
      merged = true;
      break;
    }
    if (!merged) aggs[pick].stuck = true;
  }

  for (const auto& a : aggs) {
    if (!a.alive) continue;
    if (a.stuck && a.measure < threshold) ++out.stats.stuck_cells;
    if (a.members.size() == 1) {
      const LinearRegion& c = cells[a.members.front()];
      for (auto& piece : split_convex(c.polygon())) {
        out.domain_cells.push_back(LinearRegion{std::move(piece), c.W, c.b});
      }
      continue;
    }
    for (const auto& part : convex_decomposition(SimplePolygon(a.loop))) {
      for (auto& piece : split_convex(part)) {
        out.domain_cells.push_back(LinearRegion{std::move(piece), {}, {}});
      }
    }
  }
}

void merge_1d(const AdaptedMesh& mesh, double threshold, AdaptedMesh& out) {
  struct Run {
    double lo, hi;
    std::size_t first, count;
  };
  std::vector<std::size_t> order(mesh.domain_cells.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mesh.domain_cells[a].segment().lo < mesh.domain_cells[b].segment().lo;
  });
  std::vector<Run> runs;
  for (const std::size_t i : order) {
    const auto& s = mesh.domain_cells[i].segment();
    runs.push_back({s.lo, s.hi, i, 1});
  }
  std::vector<bool> stuck(runs.size(), false);
  for (;;) {
    std::size_t pick = runs.size();
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const double m = runs[i].hi - runs[i].lo;
      if (stuck[i] || m >= threshold) continue;
      if (pick == runs.size() || m < runs[pick].hi - runs[pick].lo) pick = i;
    }
    if (pick == runs.size()) break;
    const bool has_left = pick > 0 && runs[pick - 1].hi == runs[pick].lo;
    const bool has_right = pick + 1 < runs.size() && runs[pick + 1].lo == runs[pick].hi;
    if (!has_left && !has_right) {
      stuck[pick] = true;
      continue;
    }
    std::size_t into = has_left ? pick - 1 : pick + 1;
    if (has_left && has_right &&
        runs[pick + 1].hi - runs[pick + 1].lo > runs[pick - 1].hi - runs[pick - 1].lo) {
      into = pick + 1;
    }
    Run& r = runs[into];
    r.lo = std::min(r.lo, runs[pick].lo);
    r.hi = std::max(r.hi, runs[pick].hi);
    r.count += runs[pick].count;
    stuck[into] = false;
    runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(pick));
    stuck.erase(stuck.begin() + static_cast<std::ptrdiff_t>(pick));
    ++out.stats.merged_cells;
  }
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (stuck[i] && runs[i].hi - runs[i].lo < threshold) ++out.stats.stuck_cells;
    if (runs[i].count == 1) {
      out.domain_cells.push_back(mesh.domain_cells[runs[i].first]);
    } else {
      out.domain_cells.push_back(LinearRegion{Segment1D(runs[i].lo, runs[i].hi), {}, {}});
    }
  }
}

}  // namespace

AdaptedMesh merge_small_cells(const AdaptedMesh& mesh, double threshold_fraction) {
  if (!(threshold_fraction >= 0.0)) throw InvalidParameter("merge threshold must be >= 0");
  AdaptedMesh out;
  out.dim = mesh.dim;
  out.boundary_cells = mesh.boundary_cells;
  out.median_measure = mesh.median_measure;
  out.epoch = mesh.epoch;
  out.stats = mesh.stats;
  const double threshold = threshold_fraction * mesh.median_measure;
  if (threshold <= 0.0) {
    out.domain_cells = mesh.domain_cells;
    return out;
  }
  if (mesh.dim == 1) {
    merge_1d(mesh, threshold, out);
  } else {
    merge_2d(mesh, threshold, out);
  }
  return out;
}

}  // namespace aqnn
