#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "aqnn/error.hpp"
#include "aqnn/trainer.hpp"

using aqnn::BackendKind;
using aqnn::TrainConfig;

namespace {

TrainConfig small_config(const std::string& problem, BackendKind kind, int epochs) {
  TrainConfig c;
  c.id = problem;
  c.problem.id = problem;
  c.backend.kind = kind;
  c.backend.pieces = 3;
  c.backend.order = 3;
  c.backend.n_domain = 60;
  c.backend.n_boundary = 20;
  c.backend.refresh_every = 5;
  c.epochs = epochs;
  c.log_every = 10;
  c.seed = 3;
  return c;
}

}  // namespace

TEST(Trainer, RunsAreBitIdentical) {
  for (auto kind : {BackendKind::Adaptive, BackendKind::MonteCarlo}) {
    const auto c = small_config("abse-sinc-1d", kind, 30);
    const auto a = aqnn::train(c);
    const auto b = aqnn::train(c);
    EXPECT_EQ(a.losses, b.losses);
    EXPECT_EQ(a.final_params->flatten(), b.final_params->flatten());
    EXPECT_EQ(*a.final_error, *b.final_error);
  }
}

TEST(Trainer, LossVectorAndRefreshSchedule) {
  auto c = small_config("abse-sinc-1d", BackendKind::Adaptive, 23);
  const auto r = aqnn::train(c);
  ASSERT_EQ(r.losses.size(), 24u);
  ASSERT_EQ(r.refreshes.size(), 5u);
  for (std::size_t i = 0; i < r.refreshes.size(); ++i) EXPECT_EQ(r.refreshes[i].epoch, int(5 * i));
  ASSERT_EQ(r.errors.size(), 4u);
  EXPECT_EQ(r.errors[0].first, 0);
  EXPECT_EQ(r.errors[2].first, 20);
  EXPECT_EQ(r.errors.back().first, 23);
  EXPECT_EQ(*r.initial_error, r.errors.front().second);
  EXPECT_EQ(*r.final_error, r.errors.back().second);
  ASSERT_TRUE(r.last_mesh.has_value());
  EXPECT_EQ(r.last_mesh->epoch, 20);

  c.backend.refresh_every = c.epochs;
  const auto once = aqnn::train(c);
  ASSERT_EQ(once.refreshes.size(), 1u);
  EXPECT_EQ(once.refreshes[0].epoch, 0);
}

TEST(Trainer, ZeroEpochs) {
  const auto r = aqnn::train(small_config("tanh-ring-2d", BackendKind::Adaptive, 0));
  ASSERT_EQ(r.losses.size(), 1u);
  EXPECT_EQ(r.refreshes.size(), 1u);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(*r.initial_error, *r.final_error);
  EXPECT_EQ(r.initial_params->flatten(), r.final_params->flatten());
  const auto prob = aqnn::manufactured("tanh-ring-2d", aqnn::Formulation::Weak);
  EXPECT_DOUBLE_EQ(*r.final_error, aqnn::relative_l2_error(*r.initial_params, prob));
}

TEST(Trainer, ZeroLearningRateKeepsParameters) {
  auto c = small_config("abse-sinc-1d", BackendKind::Adaptive, 12);
  c.learning_rate = 0.0;
  const auto r = aqnn::train(c);
  EXPECT_EQ(r.initial_params->flatten(), r.final_params->flatten());
  for (double l : r.losses) EXPECT_EQ(l, r.losses.front());
}

TEST(Trainer, SameSeedSameInitialisationAcrossBackends) {
  const auto aq = aqnn::train(small_config("abse-sinc-2d", BackendKind::Adaptive, 0));
  const auto mc = aqnn::train(small_config("abse-sinc-2d", BackendKind::MonteCarlo, 0));
  EXPECT_EQ(aq.initial_params->flatten(), mc.initial_params->flatten());
  EXPECT_EQ(*aq.initial_error, *mc.initial_error);
}

TEST(Trainer, MonteCarloPointCounts) {
  const auto r2 = aqnn::train(small_config("tanh-ring-2d", BackendKind::MonteCarlo, 12));
  EXPECT_EQ(r2.avg_domain_points, 60.0);
  EXPECT_EQ(r2.avg_boundary_points, 20.0);
  EXPECT_EQ(r2.refreshes.size(), 3u);
  EXPECT_FALSE(r2.last_mesh.has_value());
  const auto r1 = aqnn::train(small_config("tanh-ring-1d", BackendKind::MonteCarlo, 3));
  EXPECT_EQ(r1.avg_boundary_points, 2.0);
}

TEST(Trainer, TrainingReducesEnergy) {
  for (auto kind : {BackendKind::Adaptive, BackendKind::MonteCarlo}) {
    auto c = small_config("abse-sinc-1d", kind, 300);
    c.backend.refresh_every = 300;
    const auto r = aqnn::train(c);
    EXPECT_LT(r.final_loss(), r.initial_loss());
  }
}

TEST(Trainer, MergingReducesPointCount) {
  auto c = small_config("abse-sinc-1d", BackendKind::Adaptive, 1);
  c.backend.pieces = 5;
  const auto plain = aqnn::train(c);
  c.backend.merge_threshold = 0.5;
  const auto merged = aqnn::train(c);
  EXPECT_LT(merged.avg_domain_points, plain.avg_domain_points);
  EXPECT_GT(merged.mesh_stats.merged_cells, 0u);
  EXPECT_EQ(plain.mesh_stats.merged_cells, 0u);
}

TEST(Trainer, ValidateConfig) {
  const auto base = small_config("abse-sinc-1d", BackendKind::Adaptive, 10);
  EXPECT_NO_THROW(aqnn::validate_config(base));
  auto bad = [&](auto mutate) {
    auto c = base;
    mutate(c);
    return c;
  };
  const std::vector<TrainConfig> cases{
      bad([](TrainConfig& c) { c.epochs = -1; }),
      bad([](TrainConfig& c) { c.backend.refresh_every = 0; }),
      bad([](TrainConfig& c) { c.learning_rate = -1e-3; }),
      bad([](TrainConfig& c) { c.log_every = 0; }),
      bad([](TrainConfig& c) { c.beta = 0.0; }),
      bad([](TrainConfig& c) { c.backend.order = 11; }),
      bad([](TrainConfig& c) { c.backend.order = 0; }),
      bad([](TrainConfig& c) { c.backend.pieces = 1; }),
      bad([](TrainConfig& c) { c.backend.merge_threshold = -0.1; }),
      bad([](TrainConfig& c) {
        c.backend.kind = BackendKind::MonteCarlo;
        c.backend.n_domain = 0;
      }),
      bad([](TrainConfig& c) { c.architecture = {1, 0, 1}; }),
  };
  for (const auto& c : cases) EXPECT_THROW(aqnn::validate_config(c), aqnn::InvalidParameter);
  EXPECT_THROW(aqnn::train(bad([](TrainConfig& c) { c.architecture = {2, 5, 1}; })),
               aqnn::InvalidParameter);
}

TEST(Trainer, BuildCustomProblem) {
  aqnn::ProblemSpec spec;
  spec.id = "custom";
  spec.intervals = {{0.0, 1.0}};
  spec.exact = "x^3";
  const auto p = aqnn::build_problem(spec, aqnn::Formulation::Weak);
  EXPECT_DOUBLE_EQ(p.forcing({0.5, 0}), -3.0);
  EXPECT_DOUBLE_EQ(p.boundary_data({1, 0}), 1.0);
  EXPECT_TRUE(p.has_exact());
  spec.exact.clear();
  EXPECT_THROW(aqnn::build_problem(spec, aqnn::Formulation::Weak), aqnn::InvalidParameter);
  spec.forcing = "1";
  spec.boundary = "0";
  EXPECT_FALSE(aqnn::build_problem(spec, aqnn::Formulation::Weak).has_exact());
  spec.polygons = {{{0, 0}, {1, 0}, {0, 1}}};
  EXPECT_THROW(aqnn::build_problem(spec, aqnn::Formulation::Weak), aqnn::InvalidParameter);
}

TEST(Trainer, SurrogateIsCached) {
  const auto act = aqnn::SmoothActivation::abse();
  const auto& a = aqnn::surrogate_for(act, 3);
  const auto& b = aqnn::surrogate_for(aqnn::SmoothActivation::abse(), 3);
  EXPECT_EQ(&a, &b);
  EXPECT_NE(&a, &aqnn::surrogate_for(aqnn::SmoothActivation::abse(0.05), 3));
}

TEST(Trainer, RunAllPreservesOrderAndReportsFailures) {
  std::vector<TrainConfig> configs;
  for (std::uint64_t s = 0; s < 4; ++s) {
    auto c = small_config("abse-sinc-1d", s % 2 ? BackendKind::MonteCarlo : BackendKind::Adaptive, 6);
    c.id = "run" + std::to_string(s);
    c.seed = s;
    configs.push_back(c);
  }
  auto broken = configs.front();
  broken.id = "broken";
  broken.problem.id = "no-such-problem";
  configs.insert(configs.begin() + 2, broken);
  int done = 0;
  const auto pooled = aqnn::run_all(configs, 3, [&](const aqnn::RunRecord&) { ++done; });
  EXPECT_EQ(done, 5);
  ASSERT_EQ(pooled.size(), 5u);
  EXPECT_TRUE(pooled[2].aborted);
  EXPECT_FALSE(pooled[2].message.empty());
  const auto serial = aqnn::run_all(configs, 1);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    EXPECT_EQ(pooled[i].id, configs[i].id);
    EXPECT_EQ(pooled[i].losses, serial[i].losses);
  }
}

TEST(Trainer, Summarize) {
  std::vector<aqnn::RunRecord> runs(4);
  const double errs[] = {0.1, 0.3, 0.2};
  for (int i = 0; i < 3; ++i) {
    runs[i].final_error = errs[i];
    runs[i].wall_seconds = i + 1;
    runs[i].avg_domain_points = 10.0 * (i + 1);
    runs[i].avg_boundary_points = 2.0;
  }
  runs[3].aborted = true;
  runs[3].final_error = 100.0;
  const auto s = aqnn::summarize(runs);
  EXPECT_EQ(s.runs, 3u);
  EXPECT_DOUBLE_EQ(s.min_error, 0.1);
  EXPECT_DOUBLE_EQ(s.max_error, 0.3);
  EXPECT_DOUBLE_EQ(s.avg_error, 0.2);
  EXPECT_NEAR(s.std_error, std::sqrt(0.02 / 3.0), 1e-15);
  EXPECT_DOUBLE_EQ(s.avg_seconds, 2.0);
  EXPECT_DOUBLE_EQ(s.avg_domain_points, 20.0);
  std::vector<aqnn::RunRecord> none(1);
  EXPECT_TRUE(std::isnan(aqnn::summarize(none).avg_error));
}
