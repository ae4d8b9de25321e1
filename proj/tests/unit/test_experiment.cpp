#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "aqnn/error.hpp"
#include "aqnn/experiment.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("aqnn_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::size_t columns(const std::string& line) {
  return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

const char* kSmall = R"({
  "name": "small",
  "defaults": {"problem": "abse-sinc-1d", "epochs": 0, "seeds": 2,
               "backend": {"kind": "aq", "pieces": 3, "order": 2}},
  "runs": [{"id": "aq"}, {"id": "mc", "backend": {"kind": "mc", "n_domain": 30}}]
})";

}  // namespace

TEST(Manifest, ParsesDefaultsAndSeeds) {
  const auto m = aqnn::parse_manifest(kSmall, 10);
  EXPECT_EQ(m.name, "small");
  ASSERT_EQ(m.groups.size(), 2u);
  ASSERT_EQ(m.groups[0].runs.size(), 2u);
  EXPECT_EQ(m.groups[0].runs[1].seed, 11u);
  EXPECT_EQ(m.groups[0].runs[1].id, "aq-s11");
  EXPECT_EQ(m.groups[1].runs[0].backend.kind, aqnn::BackendKind::MonteCarlo);
  EXPECT_EQ(m.groups[1].runs[0].backend.n_domain, 30);
  // Fields merged from defaults survive a partial backend override.
  EXPECT_EQ(m.groups[1].runs[0].backend.pieces, 3);
  EXPECT_EQ(m.groups[1].runs[0].epochs, 0);
}

TEST(Manifest, GridExpansion) {
  const auto m = aqnn::parse_manifest(R"({
    "defaults": {"problem": "abse-sinc-1d", "epochs": 1},
    "grid": {"pieces": [2, 3], "learning_rate": [0.1, 0.01, 0.001]},
    "runs": [{"id": "a"}, {"id": "b", "seeds": [4, 9]}]
  })");
  ASSERT_EQ(m.groups.size(), 12u);
  EXPECT_EQ(m.groups[0].runs[0].backend.pieces, 2);
  EXPECT_EQ(m.groups[5].runs[0].backend.pieces, 3);
  EXPECT_DOUBLE_EQ(m.groups[5].runs[0].learning_rate, 0.001);
  EXPECT_EQ(m.groups[6].runs.size(), 2u);
  EXPECT_EQ(m.groups[6].runs[1].seed, 9u);
}

TEST(Manifest, SyntaxErrorCarriesPosition) {
  try {
    aqnn::parse_manifest("{\n  \"name\": \"x\",\n  \"runs\": [}\n}");
    FAIL();
  } catch (const aqnn::ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 12);
  }
}

TEST(Manifest, SemanticErrorsNameThePath) {
  const std::pair<const char*, const char*> cases[] = {
      {R"({"runs": [{"id": "a", "problem": "abse-sinc-1d", "epochs": "ten"}]})", "runs[0].epochs"},
      {R"({"runs": [{"id": "a", "problem": "abse-sinc-1d", "colour": 1}]})", "runs[0].colour"},
      {R"({"runs": [{"id": "a", "problem": "abse-sinc-1d"}, {"id": "a", "problem": "rhombi"}]})",
       "duplicate"},
      {R"({"runs": [{"problem": "abse-sinc-1d"}]})", "missing id"},
      {R"({"runs": [{"id": "a", "problem": "abse-sinc-1d", "backend": {"kind": "qmc"}}]})",
       "runs[0].backend"},
      {R"({"runs": [{"id": "a", "problem": "abse-sinc-1d", "backend": {"order": 12}}]})", "order"},
      {R"({"emit": {"curves": 1}})", "emit.curves"},
      {R"([1, 2])", "$"},
  };
  for (const auto& [text, needle] : cases) {
    try {
      aqnn::parse_manifest(text);
      ADD_FAILURE() << text;
    } catch (const aqnn::ParseError& e) {
      EXPECT_EQ(e.line(), 0) << text;
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  }
}

TEST(Manifest, BundledMatchesShippedFile) {
  const std::string shipped = read_file(fs::path(AQNN_MANIFEST_DIR) / "table-init-1d.json");
  EXPECT_EQ(json::parse(aqnn::bundled_manifest("table-init-1d")), json::parse(shipped));
  const auto m = aqnn::parse_manifest(shipped);
  ASSERT_EQ(m.groups.size(), 2u);
  EXPECT_EQ(m.groups[0].runs.size(), 10u);
  EXPECT_EQ(m.groups[1].runs[3].backend.order, 5);
  EXPECT_THROW(aqnn::bundled_manifest("nope"), aqnn::InvalidParameter);
}

TEST(Manifest, EmptyManifestWritesHeaderOnly) {
  const auto out = scratch("empty");
  std::ostringstream log;
  EXPECT_EQ(aqnn::run_manifest(aqnn::parse_manifest("{}"), out, 1, log), 0);
  EXPECT_EQ(read_file(out / "results.csv"), aqnn::results_csv_header());
}

TEST(Manifest, ZeroEpochRunOutputs) {
  const auto m = aqnn::parse_manifest(kSmall);
  const auto out = scratch("small");
  std::ostringstream log;
  ASSERT_EQ(aqnn::run_manifest(m, out, 2, log), 0);
  const auto rows = lines(read_file(out / "results.csv"));
  ASSERT_EQ(rows.size(), 3u);
  const std::size_t ncols = columns(rows[0]);
  EXPECT_EQ(columns(rows[1]), ncols);
  EXPECT_EQ(rows[1].rfind("aq,abse-sinc-1d,weak,abse,", 0), 0u) << rows[1];

  // With no training the reported error is the error of the initial network.
  const auto prob = aqnn::manufactured("abse-sinc-1d", aqnn::Formulation::Weak);
  const auto init = aqnn::init_params({1, 10, 10, 1}, aqnn::SmoothActivation::abse(), 0);
  const auto header = lines(aqnn::results_csv_header())[0];
  std::vector<std::string> names, values;
  for (std::istringstream h(header), v(rows[1]); ;) {
    std::string a, b;
    if (!std::getline(h, a, ',')) break;
    std::getline(v, b, ',');
    names.push_back(a);
    values.push_back(b);
  }
  const auto col = [&](const std::string& n) {
    return values[std::find(names.begin(), names.end(), n) - names.begin()];
  };
  EXPECT_NEAR(std::stod(col("error_min")), aqnn::relative_l2_error(init, prob), 1e-9);
  EXPECT_EQ(col("runs"), "2");
  EXPECT_EQ(col("aborted"), "0");
  EXPECT_EQ(col("architecture"), "1-10-10-1");
  EXPECT_EQ(col("beta"), "100");

  const auto curve = lines(read_file(out / "curves" / "aq-s0.csv"));
  ASSERT_EQ(curve.size(), 2u);
  EXPECT_EQ(curve[0], "epoch,loss,error");
  const auto pw = lines(read_file(out / "pointwise" / "mc-s1.csv"));
  EXPECT_EQ(pw[0], "x,u,exact,abs_error");
  EXPECT_EQ(pw.size(), 202u);
  EXPECT_TRUE(fs::exists(out / "mesh" / "aq-s1.json"));
  EXPECT_FALSE(fs::exists(out / "mesh" / "mc-s1.json"));
  const auto mesh = json::parse(read_file(out / "mesh" / "aq-s0.json"));
  EXPECT_TRUE(mesh.is_object());
}

TEST(Manifest, PointwiseGrid) {
  EXPECT_EQ(aqnn::pointwise_grid(aqnn::ConvexDomain::square(-1, 1)).size(), 101u * 101u);
  const auto rh = aqnn::pointwise_grid(aqnn::rhombi_domain());
  EXPECT_GT(rh.size(), 0u);
  EXPECT_LT(rh.size(), 101u * 101u);
}

#ifdef AQNN_CLI_PATH
TEST(Cli, FitCpwlWritesJson) {
  const auto out = scratch("cli");
  fs::create_directories(out);
  const auto file = out / "fit.json";
  const std::string cmd = std::string(AQNN_CLI_PATH) + " fit-cpwl --activation abse --pieces 2 3 --out " +
                          file.string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  const auto j = json::parse(read_file(file));
  EXPECT_EQ(j["activation"], "abse");
  ASSERT_EQ(j["fits"].size(), 2u);
  EXPECT_EQ(j["fits"][0]["pieces"], 2);
  // Two-piece fit of abse is ReLU, at L2 distance sqrt(gamma^3 / 3) with gamma = 2 eps.
  EXPECT_NEAR(j["fits"][0]["distance"].get<double>(), std::sqrt(std::pow(0.02, 3) / 3), 1e-12);
  EXPECT_EQ(j["fits"][1]["breakpoints"].size(), 2u);
}

TEST(Cli, RunManifestExitCodes) {
  const auto dir = scratch("cli_run");
  fs::create_directories(dir);
  std::ofstream(dir / "m.json") << R"({"runs": [{"id": "a", "problem": "abse-sinc-1d", "epochs": 2}]})";
  const std::string cli = AQNN_CLI_PATH;
  EXPECT_EQ(std::system((cli + " run-manifest --manifest " + (dir / "m.json").string() + " --out " +
                         (dir / "out").string() + " 2>/dev/null")
                            .c_str()),
            0);
  EXPECT_EQ(lines(read_file(dir / "out" / "results.csv")).size(), 2u);
  std::ofstream(dir / "bad.json") << "{ \"runs\": [";
  EXPECT_NE(std::system((cli + " run-manifest --manifest " + (dir / "bad.json").string() + " --out " +
                         (dir / "out2").string() + " 2>/dev/null")
                            .c_str()),
            0);
}
#endif
