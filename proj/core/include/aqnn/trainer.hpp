#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aqnn/loss.hpp"
#include "aqnn/mesh.hpp"
#include "aqnn/net.hpp"
#include "aqnn/problem.hpp"

namespace aqnn {

enum class BackendKind { Adaptive, MonteCarlo };

struct BackendSpec {
  BackendKind kind = BackendKind::Adaptive;
  // Adaptive quadrature.
  int pieces = 3;
  int order = 2;
  double merge_threshold = 0.0;  // fraction of the median cell measure
  // Monte-Carlo.
  int n_domain = 100;
  int n_boundary = 2;
  // Epochs between refreshes of the integration points.
  int refresh_every = 10;
};

// Catalogue id, or a custom problem given by its domain and expressions.
// A custom problem sets either `exact` or both `forcing` and `boundary`.
struct ProblemSpec {
  std::string id;
  std::vector<std::pair<double, double>> intervals;  // 1D parts
  std::vector<std::vector<Vec2>> polygons;           // 2D convex parts
  std::string exact;
  std::string forcing;
  std::string boundary;

  bool is_custom() const { return !intervals.empty() || !polygons.empty(); }
};

PoissonProblem build_problem(const ProblemSpec& spec, Formulation f,
                             std::optional<double> beta = std::nullopt);

struct TrainConfig {
  std::string id;
  ProblemSpec problem;
  Architecture architecture;          // empty: (d, 10, 10, 1)
  std::string activation;             // empty: the catalogue pairing, else abse
  std::optional<double> epsilon;
  Formulation formulation = Formulation::Weak;
  BackendSpec backend;
  double learning_rate = 1e-2;
  int epochs = 5000;
  std::optional<double> beta;
  std::uint64_t seed = 0;
  int log_every = 100;  // epochs between error evaluations
};

// Throws InvalidParameter for inconsistent settings.
void validate_config(const TrainConfig& config);

struct RefreshRecord {
  int epoch;
  Eigen::Index domain_points;
  Eigen::Index boundary_points;
};

struct RunRecord {
  std::string id;
  std::uint64_t seed = 0;
  // losses[e] is the energy at epoch e before its update; the last entry is
  // the energy after the final update.
  std::vector<double> losses;
  std::vector<std::pair<int, double>> errors;  // (epoch, relative L2 error)
  std::vector<RefreshRecord> refreshes;
  std::optional<double> initial_error;
  std::optional<double> final_error;
  double wall_seconds = 0.0;
  double avg_domain_points = 0.0;
  double avg_boundary_points = 0.0;
  std::optional<NetworkParams> initial_params;
  std::optional<NetworkParams> final_params;
  std::optional<AdaptedMesh> last_mesh;  // adaptive backend only
  MeshStats mesh_stats;                  // summed over refreshes
  bool aborted = false;
  std::string message;

  double initial_loss() const { return losses.front(); }
  double final_loss() const { return losses.back(); }
};

// Surrogate of `act` with `pieces` pieces; fitted once per process and
// shared between runs.
const CpwlFunction& surrogate_for(const SmoothActivation& act, int pieces);

SmoothActivation config_activation(const TrainConfig& config);

// Throws TrainingError (naming the epoch) if a refresh fails.
RunRecord train(const TrainConfig& config);

// Runs every config on `workers` threads; records come back in input
// order. Failed runs are reported with `aborted` set instead of throwing.
std::vector<RunRecord> run_all(const std::vector<TrainConfig>& configs, int workers,
                               const std::function<void(const RunRecord&)>& on_done = {});

struct StudySummary {
  std::size_t runs = 0;
  double min_error = 0.0;
  double avg_error = 0.0;
  double std_error = 0.0;  // population standard deviation
  double max_error = 0.0;
  double avg_seconds = 0.0;
  double avg_domain_points = 0.0;
  double avg_boundary_points = 0.0;
};

// Over the completed runs that have a final error; error fields are NaN
// when there is none.
StudySummary summarize(std::span<const RunRecord> runs);

}  // namespace aqnn
