#include <benchmark/benchmark.h>

#include "aqnn/mesh.hpp"
#include "aqnn/trainer.hpp"

namespace {

void BM_AdaptiveMesh2d(benchmark::State& state) {
  const auto act = aqnn::SmoothActivation::abse();
  const auto& s = aqnn::surrogate_for(act, static_cast<int>(state.range(0)));
  const auto p = aqnn::init_params({2, 10, 10, 1}, act, 1);
  const auto dom = aqnn::ConvexDomain::square(-1, 1);
  std::size_t cells = 0;
  for (auto _ : state) {
    const auto mesh = aqnn::adaptive_mesh(p, s, dom);
    cells = mesh.domain_cells.size();
    benchmark::DoNotOptimize(cells);
  }
  state.counters["cells"] = static_cast<double>(cells);
}
BENCHMARK(BM_AdaptiveMesh2d)->Arg(2)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_AdaptiveMesh1d(benchmark::State& state) {
  const auto act = aqnn::SmoothActivation::abse();
  const auto& s = aqnn::surrogate_for(act, static_cast<int>(state.range(0)));
  const auto p = aqnn::init_params({1, 10, 10, 1}, act, 1);
  const auto dom = aqnn::ConvexDomain::interval(-1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(aqnn::adaptive_mesh(p, s, dom));
}
BENCHMARK(BM_AdaptiveMesh1d)->Arg(3)->Arg(5)->Unit(benchmark::kMicrosecond);

void BM_MergeSmallCells(benchmark::State& state) {
  const auto act = aqnn::SmoothActivation::abse();
  const auto p = aqnn::init_params({2, 10, 10, 1}, act, 1);
  const auto mesh = aqnn::adaptive_mesh(p, aqnn::surrogate_for(act, 3), aqnn::ConvexDomain::square(-1, 1));
  for (auto _ : state) benchmark::DoNotOptimize(aqnn::merge_small_cells(mesh, 0.25));
}
BENCHMARK(BM_MergeSmallCells)->Unit(benchmark::kMillisecond);

}  // namespace
