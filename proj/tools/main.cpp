#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aqnn/cpwl.hpp"
#include "aqnn/error.hpp"
#include "aqnn/experiment.hpp"
#include "aqnn/json_io.hpp"

namespace {

int run_manifest_command(const std::string& manifest_arg, std::string out_arg, int workers,
                         std::uint64_t seed_base) {
  namespace fs = std::filesystem;
  aqnn::ExperimentManifest manifest;
  if (fs::exists(manifest_arg)) {
    manifest = aqnn::load_manifest(manifest_arg, seed_base);
  } else {
    manifest = aqnn::parse_manifest(aqnn::bundled_manifest(manifest_arg), seed_base);
  }
  if (const char* env = std::getenv("AQNN_OUT_DIR"); env && *env && out_arg.empty()) out_arg = env;
  if (out_arg.empty()) out_arg = manifest.output;
  if (out_arg.empty()) out_arg = "out/" + (manifest.name.empty() ? std::string("run") : manifest.name);
  const int aborted = aqnn::run_manifest(manifest, out_arg, workers, std::cerr);
  std::cerr << "results written to " << out_arg << "/results.csv\n";
  if (aborted > 0) {
    std::cerr << aborted << " run(s) aborted\n";
    return 1;
  }
  return 0;
}

int fit_cpwl_command(const std::string& activation, std::optional<double> eps,
                     const std::vector<int>& pieces, const std::string& out) {
  const auto act = aqnn::SmoothActivation::from_name(activation, eps);
  std::vector<aqnn::CpwlFit> fits;
  for (const int n : pieces) fits.push_back(aqnn::best_l2_fit(act, n));
  const std::string report = aqnn::fit_report_json(act, fits);
  if (out.empty() || out == "-") {
    std::cout << report << '\n';
  } else {
    std::ofstream(out) << report << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Train small networks on Poisson problems with adaptive quadrature or Monte-Carlo"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run-manifest", "Train every run of a manifest and write results");
  std::string manifest, out;
  int workers = 1;
  std::uint64_t seed_base = 0;
  run->add_option("--manifest", manifest, "Manifest file, or the name of a bundled manifest")
      ->required();
  run->add_option("--out", out, "Output directory (default: $AQNN_OUT_DIR, then the manifest's)");
  run->add_option("--workers", workers, "Concurrent runs")->check(CLI::PositiveNumber);
  run->add_option("--seed-base", seed_base, "Offset added to every seed");

  auto* fit = app.add_subcommand("fit-cpwl", "Best L2 CPWL fits of an activation");
  std::string activation = "tanh";
  std::optional<double> eps;
  std::vector<int> pieces{3};
  std::string fit_out;
  fit->add_option("--activation", activation, "abse, lncosh, erf or tanh");
  fit->add_option("--epsilon", eps, "Regularisation distance (ReLU families)");
  fit->add_option("--pieces", pieces, "Piece counts, e.g. --pieces 8 16 32 64")->expected(1, -1);
  fit->add_option("--out", fit_out, "Output JSON file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return run_manifest_command(manifest, out, workers, seed_base);
    if (*fit) return fit_cpwl_command(activation, eps, pieces, fit_out);
  } catch (const aqnn::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
