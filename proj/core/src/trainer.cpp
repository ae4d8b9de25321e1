#include "aqnn/trainer.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "aqnn/error.hpp"

namespace aqnn {

PoissonProblem build_problem(const ProblemSpec& spec, Formulation f, std::optional<double> beta) {
  if (!spec.is_custom()) return manufactured(spec.id, f, beta);
  if (!spec.intervals.empty() && !spec.polygons.empty()) {
    throw InvalidParameter("problem '" + spec.id + "' mixes intervals and polygons");
  }
  ConvexDomain domain = [&] {
    if (!spec.intervals.empty()) {
      std::vector<Segment1D> parts;
      for (const auto& [lo, hi] : spec.intervals) parts.emplace_back(lo, hi);
      return ConvexDomain::from_segments(std::move(parts));
    }
    std::vector<ConvexPolygon> parts;
    for (const auto& p : spec.polygons) parts.emplace_back(p);
    return ConvexDomain::from_polygons(std::move(parts));
  }();
  const int d = domain.dim();
  if (!spec.exact.empty() && spec.forcing.empty() && spec.boundary.empty()) {
    return problem_from_solution(spec.id, std::move(domain), Expression::parse(spec.exact, d), f,
                                 beta);
  }
  if (spec.forcing.empty() || spec.boundary.empty()) {
    throw InvalidParameter("problem '" + spec.id + "' needs an exact solution or both forcing and boundary data");
  }
  std::optional<Expression> exact;
  if (!spec.exact.empty()) exact = Expression::parse(spec.exact, d);
  return problem_from_data(spec.id, std::move(domain), Expression::parse(spec.forcing, d),
                           Expression::parse(spec.boundary, d), exact, f, beta);
}

void validate_config(const TrainConfig& c) {
  if (c.epochs < 0) throw InvalidParameter("epochs must be >= 0");
  if (c.backend.refresh_every < 1) throw InvalidParameter("refresh_every must be >= 1");
  if (!(c.learning_rate >= 0.0)) throw InvalidParameter("learning_rate must be >= 0");
  if (c.log_every < 1) throw InvalidParameter("log_every must be >= 1");
  if (c.beta && !(*c.beta > 0.0)) throw InvalidParameter("beta must be positive");
  if (c.backend.kind == BackendKind::Adaptive) {
    if (c.backend.order < 1 || c.backend.order > kMaxOrder) {
      throw InvalidParameter("order must be in [1, " + std::to_string(kMaxOrder) + "]");
    }
    if (c.backend.pieces < 2) throw InvalidParameter("pieces must be >= 2");
    if (!(c.backend.merge_threshold >= 0.0)) throw InvalidParameter("merge threshold must be >= 0");
  } else {
    if (c.backend.n_domain < 1) throw InvalidParameter("n_domain must be >= 1");
    if (c.backend.n_boundary < 1) throw InvalidParameter("n_boundary must be >= 1");
  }
  if (!c.architecture.empty()) validate_architecture(c.architecture);
}

const CpwlFunction& surrogate_for(const SmoothActivation& act, int pieces) {
  static std::mutex mutex;
  static std::map<std::tuple<std::string, double, int>, CpwlFunction> cache;
  const auto key = std::make_tuple(act.name(), act.epsilon().value_or(0.0), pieces);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  CpwlFunction fit = best_l2_fit(act, pieces).function;
  std::lock_guard lock(mutex);
  return cache.try_emplace(key, std::move(fit)).first->second;
}

SmoothActivation config_activation(const TrainConfig& config) {
  std::string name = config.activation;
  if (name.empty()) {
    name = config.problem.is_custom() ? "abse" : catalogue_activation(config.problem.id);
  }
  return SmoothActivation::from_name(name, config.epsilon);
}

RunRecord train(const TrainConfig& config) {
  validate_config(config);
  const auto start = std::chrono::steady_clock::now();
  const PoissonProblem problem = build_problem(config.problem, config.formulation, config.beta);
  const int d = problem.dim();
  const SmoothActivation act = config_activation(config);
  Architecture arch = config.architecture.empty() ? Architecture{d, 10, 10, 1} : config.architecture;
  if (arch.front() != d) throw InvalidParameter("architecture input width does not match the domain");
  const BackendSpec& backend = config.backend;
  const bool adaptive = backend.kind == BackendKind::Adaptive;
  const CpwlFunction* surrogate = adaptive ? &surrogate_for(act, backend.pieces) : nullptr;

  std::optional<L2ErrorEvaluator> error;
  if (problem.has_exact()) error.emplace(problem);

  RunRecord rec;
  rec.id = config.id;
  rec.seed = config.seed;
  NetworkParams params = init_params(arch, act, config.seed);
  rec.initial_params = params;
  AdamState adam = make_adam(param_count(arch), config.learning_rate);
  std::mt19937_64 sampler(config.seed ^ 0x6a09e667f3bcc909ULL);
  IntegrationPoints pts;

  auto refresh = [&](int epoch) {
    try {
      if (adaptive) {
        AdaptedMesh mesh = adaptive_mesh(params, *surrogate, problem.domain);
        if (backend.merge_threshold > 0.0) mesh = merge_small_cells(mesh, backend.merge_threshold);
        mesh.epoch = epoch;
        pts = aq_points(mesh, backend.order);
        rec.mesh_stats.fallback_cuts += mesh.stats.fallback_cuts;
        rec.mesh_stats.merged_cells += mesh.stats.merged_cells;
        rec.mesh_stats.stuck_cells += mesh.stats.stuck_cells;
        rec.last_mesh = std::move(mesh);
      } else {
        pts = mc_points(problem.domain, backend.n_domain, backend.n_boundary, sampler());
      }
      attach_data(pts, problem);
    } catch (const std::exception& e) {
      throw TrainingError("run '" + config.id + "' aborted at epoch " + std::to_string(epoch) +
                          ": " + e.what());
    }
    rec.refreshes.push_back({epoch, pts.domain_size(), pts.boundary_size()});
  };
  auto log_error = [&](int epoch) {
    if (!error) return;
    const double e = (*error)(params);
    rec.errors.emplace_back(epoch, e);
  };

  rec.losses.reserve(static_cast<std::size_t>(config.epochs) + 1);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (epoch % backend.refresh_every == 0) refresh(epoch);
    if (epoch % config.log_every == 0) log_error(epoch);
    const LossEvaluation lg = loss_and_gradient(params, problem, pts);
    rec.losses.push_back(lg.value);
    adam_step(adam, params, lg.gradient);
  }
  if (config.epochs == 0) refresh(0);
  rec.losses.push_back(loss_value(params, problem, pts));
  if (rec.errors.empty() || rec.errors.back().first != config.epochs) log_error(config.epochs);
  if (!rec.errors.empty()) {
    rec.initial_error = rec.errors.front().second;
    rec.final_error = rec.errors.back().second;
  }

  double nd = 0.0, nb = 0.0;
  for (const auto& r : rec.refreshes) {
    nd += static_cast<double>(r.domain_points);
    nb += static_cast<double>(r.boundary_points);
  }
  rec.avg_domain_points = nd / static_cast<double>(rec.refreshes.size());
  rec.avg_boundary_points = nb / static_cast<double>(rec.refreshes.size());
  rec.final_params = std::move(params);
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<RunRecord> run_all(const std::vector<TrainConfig>& configs, int workers,
                               const std::function<void(const RunRecord&)>& on_done) {
  std::vector<RunRecord> out(configs.size());
  std::atomic<std::size_t> next{0};
  std::mutex done_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      try {
        out[i] = train(configs[i]);
      } catch (const std::exception& e) {
        out[i] = RunRecord{};
        out[i].id = configs[i].id;
        out[i].seed = configs[i].seed;
        out[i].aborted = true;
        out[i].message = e.what();
      }
      if (on_done) {
        std::lock_guard lock(done_mutex);
        on_done(out[i]);
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(configs.size())));
  if (n == 1) {
    work();
    return out;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < n; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return out;
}

StudySummary summarize(std::span<const RunRecord> runs) {
  StudySummary s;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.min_error = s.avg_error = s.std_error = s.max_error = nan;
  std::vector<double> errs;
  for (const auto& r : runs) {
    if (r.aborted) continue;
    ++s.runs;
    s.avg_seconds += r.wall_seconds;
    s.avg_domain_points += r.avg_domain_points;
    s.avg_boundary_points += r.avg_boundary_points;
    if (r.final_error) errs.push_back(*r.final_error);
  }
  if (s.runs > 0) {
    const double n = static_cast<double>(s.runs);
    s.avg_seconds /= n;
    s.avg_domain_points /= n;
    s.avg_boundary_points /= n;
  }
  if (!errs.empty()) {
    double sum = 0.0;
    s.min_error = s.max_error = errs.front();
    for (const double e : errs) {
      sum += e;
      s.min_error = std::min(s.min_error, e);
      s.max_error = std::max(s.max_error, e);
    }
    s.avg_error = sum / static_cast<double>(errs.size());
    double var = 0.0;
    for (const double e : errs) var += (e - s.avg_error) * (e - s.avg_error);
    s.std_error = std::sqrt(var / static_cast<double>(errs.size()));
  }
  return s;
}

}  // namespace aqnn
