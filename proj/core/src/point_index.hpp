#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "aqnn/geometry.hpp"

namespace aqnn::detail {

// Deduplicates points closer than `tol` (max norm) through a hash grid.
class PointIndex {
 public:
  explicit PointIndex(double tol) : tol_(tol > 0.0 ? tol : 1e-300) {}

  std::size_t insert(Vec2 p) {
    const auto kx = key(p.x), ky = key(p.y);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = cells_.find(hash(kx + dx, ky + dy));
        if (it == cells_.end()) continue;
        for (const std::size_t id : it->second) {
          const Vec2 q = points_[id];
          if (std::abs(q.x - p.x) <= tol_ && std::abs(q.y - p.y) <= tol_) return id;
        }
      }
    }
    const std::size_t id = points_.size();
    points_.push_back(p);
    cells_[hash(kx, ky)].push_back(id);
    return id;
  }

  const std::vector<Vec2>& points() const { return points_; }
  const Vec2& operator[](std::size_t i) const { return points_[i]; }
  std::size_t size() const { return points_.size(); }

 private:
  std::int64_t key(double v) const { return static_cast<std::int64_t>(std::floor(v / tol_)); }
  static std::uint64_t hash(std::int64_t a, std::int64_t b) {
    return static_cast<std::uint64_t>(a) * 0x9E3779B97F4A7C15ULL ^
           (static_cast<std::uint64_t>(b) + 0x632BE59BD9B4E019ULL);
  }

  double tol_;
  std::vector<Vec2> points_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

}  // namespace aqnn::detail
