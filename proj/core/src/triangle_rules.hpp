#pragma once

#include <span>

namespace aqnn::detail {

struct TriangleNode {
  double x;
  double y;
  double w;
};

// Symmetric rule on the unit triangle with degree of exactness >= degree,
// for degree in [1, 10]; empty otherwise.
std::span<const TriangleNode> witherden_vincent_triangle(int degree);

}  // namespace aqnn::detail
