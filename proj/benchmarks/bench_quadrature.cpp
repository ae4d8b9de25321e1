#include <benchmark/benchmark.h>

#include "aqnn/cpwl.hpp"
#include "aqnn/quadrature.hpp"

namespace {

void BM_MapRule(benchmark::State& state) {
  const aqnn::ConvexPolygon quad({{0, 0}, {1.2, 0.1}, {1.0, 0.9}, {0.1, 1.1}});
  const auto cell = aqnn::make_polygon_cell(quad);
  const auto& r = aqnn::rule(aqnn::Shape::Quadrangle, static_cast<int>(state.range(0)));
  aqnn::MappedPoints out;
  for (auto _ : state) {
    out.points.clear();
    out.weights.clear();
    aqnn::map_rule(r, cell, out);
    benchmark::DoNotOptimize(out.weights.data());
  }
}
BENCHMARK(BM_MapRule)->Arg(2)->Arg(10);

void BM_SplitConvex(benchmark::State& state) {
  std::vector<aqnn::Vec2> v;
  const int n = static_cast<int>(state.range(0));
  for (int i = 0; i < n; ++i) v.push_back({std::cos(2 * M_PI * i / n), std::sin(2 * M_PI * i / n)});
  const aqnn::ConvexPolygon poly(v);
  for (auto _ : state) benchmark::DoNotOptimize(aqnn::split_convex(poly));
}
BENCHMARK(BM_SplitConvex)->Arg(5)->Arg(8)->Arg(16);

void BM_BestL2Fit(benchmark::State& state) {
  const auto act = aqnn::SmoothActivation::tanh();
  for (auto _ : state) benchmark::DoNotOptimize(aqnn::best_l2_fit(act, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_BestL2Fit)->Arg(5)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
