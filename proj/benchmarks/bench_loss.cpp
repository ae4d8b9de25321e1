#include <benchmark/benchmark.h>

#include "aqnn/loss.hpp"
#include "aqnn/trainer.hpp"

namespace {

void BM_LossAndGradient(benchmark::State& state) {
  const bool strong = state.range(0) != 0;
  const auto n = static_cast<int>(state.range(1));
  const auto prob = aqnn::manufactured("abse-sinc-2d", strong ? aqnn::Formulation::Strong : aqnn::Formulation::Weak);
  const auto p = aqnn::init_params({2, 10, 10, 1}, aqnn::SmoothActivation::abse(), 2);
  auto pts = aqnn::mc_points(prob.domain, n, n / 10, 3);
  aqnn::attach_data(pts, prob);
  for (auto _ : state) benchmark::DoNotOptimize(aqnn::loss_and_gradient(p, prob, pts));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_LossAndGradient)
    ->ArgsProduct({{0, 1}, {1000, 5000}})
    ->ArgNames({"strong", "points"})
    ->Unit(benchmark::kMillisecond);

void BM_ForwardJet(benchmark::State& state) {
  const auto p = aqnn::init_params({2, 10, 10, 1}, aqnn::SmoothActivation::tanh(), 2);
  Eigen::VectorXd x(2);
  x << 0.3, -0.2;
  for (auto _ : state) benchmark::DoNotOptimize(aqnn::forward_jet(p, x));
}
BENCHMARK(BM_ForwardJet);

void BM_AqPoints(benchmark::State& state) {
  const auto act = aqnn::SmoothActivation::abse();
  const auto p = aqnn::init_params({2, 10, 10, 1}, act, 1);
  const auto mesh = aqnn::adaptive_mesh(p, aqnn::surrogate_for(act, 3), aqnn::ConvexDomain::square(-1, 1));
  for (auto _ : state) benchmark::DoNotOptimize(aqnn::aq_points(mesh, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_AqPoints)->Arg(2)->Arg(5)->Arg(10)->Unit(benchmark::kMicrosecond);

}  // namespace
