#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "aqnn/trainer.hpp"

namespace aqnn {

struct EmitFlags {
  bool curves = true;
  bool pointwise = true;
  bool mesh = true;
};

// One configuration trained from several seeds; reported as one row.
struct ExperimentGroup {
  std::string id;
  std::vector<TrainConfig> runs;
};

struct ExperimentManifest {
  std::string name;
  std::string output;  // may be empty
  EmitFlags emit;
  std::vector<ExperimentGroup> groups;
};

// JSON manifest:
//   {"name": ..., "output": ..., "emit": {"curves", "pointwise", "mesh"},
//    "defaults": {run fields}, "grid": {field: [values]}, "runs": [{run fields}]}
// Run fields: id, problem (catalogue id or object with id, intervals,
// polygons, exact, forcing, boundary), formulation, architecture,
// activation, epsilon, learning_rate, epochs, beta, log_every, seeds (count
// or list), backend {kind: "aq" | "mc", pieces, order, merge_threshold,
// n_domain, n_boundary, refresh_every}. Each grid combination multiplies
// every run. Seeds are offset by `seed_base`.
// Throws ParseError: syntax errors carry line and column, invalid fields
// name their JSON path and carry line 0.
ExperimentManifest parse_manifest(std::string_view text, std::uint64_t seed_base = 0);
ExperimentManifest load_manifest(const std::filesystem::path& path, std::uint64_t seed_base = 0);

// Bundled manifests by name ("table-init-1d").
std::string bundled_manifest(const std::string& name);

std::string results_csv_header();

// Trains every run and writes results.csv, curves/<run>.csv,
// pointwise/<run>.csv and mesh/<run>.json under `out_dir`. Returns the
// number of aborted runs.
int run_manifest(const ExperimentManifest& manifest, const std::filesystem::path& out_dir,
                 int workers, std::ostream& log);

// Evaluation grid for pointwise output: 201 points on each 1D part, or a
// 101 x 101 grid over the bounding box restricted to the domain.
std::vector<Vec2> pointwise_grid(const ConvexDomain& domain);

}  // namespace aqnn
