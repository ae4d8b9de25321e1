#include "aqnn/experiment.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "aqnn/error.hpp"
#include "aqnn/json_io.hpp"
#include "json.hpp"

namespace aqnn {
namespace {

using nlohmann::json;

constexpr const char* kTableInit1d = R"({
  "name": "table-init-1d",
  "emit": {"curves": true, "pointwise": true, "mesh": true},
  "defaults": {
    "problem": "abse-sinc-1d",
    "formulation": "weak",
    "architecture": [1, 10, 10, 1],
    "activation": "abse",
    "learning_rate": 0.01,
    "epochs": 5000,
    "seeds": 10,
    "log_every": 50,
    "backend": {"refresh_every": 10}
  },
  "runs": [
    {"id": "mc", "backend": {"kind": "mc", "n_domain": 100, "n_boundary": 2}},
    {"id": "aq", "backend": {"kind": "aq", "pieces": 3, "order": 5}}
  ]
}
)";

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw ParseError("manifest: " + path + ": " + what, 0, 0);
}

const std::set<std::string> kBackendKeys = {"kind",     "pieces",     "order",        "merge_threshold",
                                            "n_domain", "n_boundary", "refresh_every"};
const std::set<std::string> kRunKeys = {"id",          "problem", "formulation", "architecture",
                                        "activation",  "epsilon", "learning_rate", "epochs",
                                        "beta",        "log_every", "seeds",     "backend"};

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) invalid(path, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) invalid(path, "expected an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) invalid(path, "expected a string");
  return j.get<std::string>();
}

Vec2 get_point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) invalid(path, "expected [x, y]");
  return {get_number(j[0], path + "[0]"), get_number(j[1], path + "[1]")};
}

ProblemSpec parse_problem(const json& j, const std::string& path) {
  ProblemSpec spec;
  if (j.is_string()) {
    spec.id = j.get<std::string>();
    return spec;
  }
  if (!j.is_object()) invalid(path, "expected a catalogue id or an object");
  for (const auto& [key, value] : j.items()) {
    const std::string p = path + "." + key;
    if (key == "id") {
      spec.id = get_string(value, p);
    } else if (key == "intervals") {
      if (!value.is_array()) invalid(p, "expected a list of [lo, hi]");
      for (std::size_t i = 0; i < value.size(); ++i) {
        const Vec2 iv = get_point(value[i], p + "[" + std::to_string(i) + "]");
        spec.intervals.emplace_back(iv.x, iv.y);
      }
    } else if (key == "polygons") {
      if (!value.is_array()) invalid(p, "expected a list of vertex lists");
      for (std::size_t i = 0; i < value.size(); ++i) {
        const std::string pi = p + "[" + std::to_string(i) + "]";
        if (!value[i].is_array()) invalid(pi, "expected a vertex list");
        std::vector<Vec2> poly;
        for (std::size_t k = 0; k < value[i].size(); ++k) {
          poly.push_back(get_point(value[i][k], pi + "[" + std::to_string(k) + "]"));
        }
        spec.polygons.push_back(std::move(poly));
      }
    } else if (key == "exact") {
      spec.exact = get_string(value, p);
    } else if (key == "forcing") {
      spec.forcing = get_string(value, p);
    } else if (key == "boundary") {
      spec.boundary = get_string(value, p);
    } else {
      invalid(p, "unknown field");
    }
  }
  if (spec.id.empty()) invalid(path, "missing id");
  if (!spec.is_custom()) {
    const auto ids = manufactured_ids();
    if (std::find(ids.begin(), ids.end(), spec.id) == ids.end()) {
      invalid(path, "unknown problem '" + spec.id + "' and no domain given");
    }
  }
  return spec;
}

BackendSpec parse_backend(const json& j, const std::string& path) {
  if (!j.is_object()) invalid(path, "expected an object");
  BackendSpec b;
  for (const auto& [key, value] : j.items()) {
    const std::string p = path + "." + key;
    if (key == "kind") {
      const std::string k = get_string(value, p);
      if (k == "aq") {
        b.kind = BackendKind::Adaptive;
      } else if (k == "mc") {
        b.kind = BackendKind::MonteCarlo;
      } else {
        invalid(p, "expected \"aq\" or \"mc\"");
      }
    } else if (key == "pieces") {
      b.pieces = get_int(value, p);
    } else if (key == "order") {
      b.order = get_int(value, p);
    } else if (key == "merge_threshold") {
      b.merge_threshold = get_number(value, p);
    } else if (key == "n_domain") {
      b.n_domain = get_int(value, p);
    } else if (key == "n_boundary") {
      b.n_boundary = get_int(value, p);
    } else if (key == "refresh_every") {
      b.refresh_every = get_int(value, p);
    } else {
      invalid(p, "unknown field");
    }
  }
  return b;
}

std::string format_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  std::ostringstream os;
  os << v.get<double>();
  return os.str();
}

ExperimentGroup parse_group(const json& j, const std::string& path, std::uint64_t seed_base) {
  if (!j.is_object()) invalid(path, "expected an object");
  TrainConfig base;
  std::vector<std::uint64_t> seeds{0};
  for (const auto& [key, value] : j.items()) {
    const std::string p = path + "." + key;
    if (!kRunKeys.count(key)) invalid(p, "unknown field");
    if (key == "id") {
      base.id = get_string(value, p);
    } else if (key == "problem") {
      base.problem = parse_problem(value, p);
    } else if (key == "formulation") {
      try {
        base.formulation = formulation_from_name(get_string(value, p));
      } catch (const InvalidParameter& e) {
        invalid(p, e.what());
      }
    } else if (key == "architecture") {
      if (!value.is_array()) invalid(p, "expected a list of widths");
      base.architecture.clear();
      for (std::size_t i = 0; i < value.size(); ++i) {
        base.architecture.push_back(get_int(value[i], p + "[" + std::to_string(i) + "]"));
      }
    } else if (key == "activation") {
      base.activation = get_string(value, p);
    } else if (key == "epsilon") {
      base.epsilon = get_number(value, p);
    } else if (key == "learning_rate") {
      base.learning_rate = get_number(value, p);
    } else if (key == "epochs") {
      base.epochs = get_int(value, p);
    } else if (key == "beta") {
      base.beta = get_number(value, p);
    } else if (key == "log_every") {
      base.log_every = get_int(value, p);
    } else if (key == "seeds") {
      seeds.clear();
      if (value.is_number_integer()) {
        const int n = value.get<int>();
        if (n < 1) invalid(p, "seed count must be >= 1");
        for (int s = 0; s < n; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
      } else if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
          const std::string ps = p + "[" + std::to_string(i) + "]";
          if (!value[i].is_number_unsigned()) invalid(ps, "expected a non-negative integer");
          seeds.push_back(value[i].get<std::uint64_t>());
        }
        if (seeds.empty()) invalid(p, "empty seed list");
      } else {
        invalid(p, "expected a count or a list of seeds");
      }
    } else if (key == "backend") {
      base.backend = parse_backend(value, p);
    }
  }
  if (base.id.empty()) invalid(path, "missing id");
  if (base.problem.id.empty()) invalid(path, "missing problem");
  try {
    validate_config(base);
    (void)config_activation(base);
  } catch (const InvalidParameter& e) {
    invalid(path, e.what());
  }
  ExperimentGroup g;
  g.id = base.id;
  for (const std::uint64_t s : seeds) {
    TrainConfig c = base;
    c.seed = s + seed_base;
    c.id = base.id + "-s" + std::to_string(c.seed);
    g.runs.push_back(std::move(c));
  }
  return g;
}

// Run objects for every combination of grid values.
std::vector<json> expand_grid(const json& run, const json& grid) {
  std::vector<json> out{run};
  for (const auto& [key, values] : grid.items()) {
    if (!values.is_array() || values.empty()) invalid("grid." + key, "expected a non-empty list");
    if (!kRunKeys.count(key) && !kBackendKeys.count(key)) invalid("grid." + key, "unknown field");
    std::vector<json> next;
    for (const json& r : out) {
      for (const json& v : values) {
        json copy = r;
        if (kBackendKeys.count(key)) {
          copy["backend"][key] = v;
        } else {
          copy[key] = v;
        }
        copy["id"] = copy.value("id", std::string()) + "-" + key + "=" + format_value(v);
        next.push_back(std::move(copy));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
}

std::string results_row(const ExperimentGroup& g, std::span<const RunRecord> runs) {
  const TrainConfig& c = g.runs.front();
  const StudySummary s = summarize(runs);
  std::size_t aborted = 0;
  for (const auto& r : runs) aborted += r.aborted ? 1 : 0;
  const PoissonProblem problem = build_problem(c.problem, c.formulation, c.beta);
  const Architecture resolved =
      c.architecture.empty() ? Architecture{problem.dim(), 10, 10, 1} : c.architecture;
  std::ostringstream arch;
  for (std::size_t i = 0; i < resolved.size(); ++i) arch << (i ? "-" : "") << resolved[i];
  const bool aq = c.backend.kind == BackendKind::Adaptive;
  const SmoothActivation act = config_activation(c);
  std::ostringstream row;
  row << g.id << ',' << c.problem.id << ',' << formulation_name(c.formulation) << ','
      << act.name() << ',' << fmt(act.epsilon().value_or(std::nan(""))) << ',' << arch.str()
      << ',' << (aq ? "aq" : "mc") << ',' << (aq ? std::to_string(c.backend.pieces) : "") << ','
      << (aq ? std::to_string(c.backend.order) : "") << ','
      << (aq ? fmt(c.backend.merge_threshold) : "") << ','
      << (aq ? "" : std::to_string(c.backend.n_domain)) << ','
      << (aq ? "" : std::to_string(c.backend.n_boundary)) << ',' << c.backend.refresh_every << ','
      << fmt(c.learning_rate) << ',' << c.epochs << ','
      << fmt(problem.beta) << ',' << runs.size() << ',' << aborted << ','
      << fmt(s.min_error) << ',' << fmt(s.avg_error) << ',' << fmt(s.std_error) << ','
      << fmt(s.max_error) << ',' << fmt(s.avg_domain_points) << ','
      << fmt(s.avg_boundary_points) << ',' << fmt(s.avg_seconds) << '\n';
  return row.str();
}

std::string curve_csv(const RunRecord& r) {
  std::map<int, double> errs(r.errors.begin(), r.errors.end());
  std::ostringstream os;
  os << "epoch,loss,error\n";
  for (std::size_t e = 0; e < r.losses.size(); ++e) {
    os << e << ',' << fmt(r.losses[e]) << ',';
    if (auto it = errs.find(static_cast<int>(e)); it != errs.end()) os << fmt(it->second);
    os << '\n';
  }
  return os.str();
}

std::string pointwise_csv(const TrainConfig& c, const RunRecord& r) {
  const PoissonProblem problem = build_problem(c.problem, c.formulation, c.beta);
  const int d = problem.dim();
  const auto grid = pointwise_grid(problem.domain);
  Eigen::MatrixXd pts(d, static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    pts(0, static_cast<Eigen::Index>(i)) = grid[i].x;
    if (d == 2) pts(1, static_cast<Eigen::Index>(i)) = grid[i].y;
  }
  const Eigen::RowVectorXd u = evaluate_batch(*r.final_params, pts);
  std::ostringstream os;
  os << (d == 1 ? "x" : "x,y") << ",u" << (problem.has_exact() ? ",exact,abs_error" : "") << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    os << fmt(grid[i].x) << ',';
    if (d == 2) os << fmt(grid[i].y) << ',';
    const double ui = u[static_cast<Eigen::Index>(i)];
    os << fmt(ui);
    if (problem.has_exact()) {
      const double ex = problem.exact(grid[i]).value;
      os << ',' << fmt(ex) << ',' << fmt(std::abs(ui - ex));
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace

ExperimentManifest parse_manifest(std::string_view text, std::uint64_t seed_base) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("manifest: syntax error at line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ": " + e.what(),
                     line, col);
  }
  if (!doc.is_object()) invalid("$", "expected an object");
  ExperimentManifest m;
  json defaults = json::object(), grid = json::object(), runs = json::array();
  for (const auto& [key, value] : doc.items()) {
    if (key == "name") {
      m.name = get_string(value, key);
    } else if (key == "output") {
      m.output = get_string(value, key);
    } else if (key == "emit") {
      if (!value.is_object()) invalid(key, "expected an object");
      for (const auto& [flag, v] : value.items()) {
        if (!v.is_boolean()) invalid("emit." + flag, "expected true or false");
        if (flag == "curves") {
          m.emit.curves = v.get<bool>();
        } else if (flag == "pointwise") {
          m.emit.pointwise = v.get<bool>();
        } else if (flag == "mesh") {
          m.emit.mesh = v.get<bool>();
        } else {
          invalid("emit." + flag, "unknown field");
        }
      }
    } else if (key == "defaults") {
      if (!value.is_object()) invalid(key, "expected an object");
      defaults = value;
    } else if (key == "grid") {
      if (!value.is_object()) invalid(key, "expected an object");
      grid = value;
    } else if (key == "runs") {
      if (!value.is_array()) invalid(key, "expected a list");
      runs = value;
    } else {
      invalid(key, "unknown field");
    }
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string path = "runs[" + std::to_string(i) + "]";
    if (!runs[i].is_object()) invalid(path, "expected an object");
    json merged = defaults;
    merged.merge_patch(runs[i]);
    for (const json& r : expand_grid(merged, grid)) {
      ExperimentGroup g = parse_group(r, path, seed_base);
      if (!ids.insert(g.id).second) invalid(path, "duplicate run id '" + g.id + "'");
      m.groups.push_back(std::move(g));
    }
  }
  return m;
}

ExperimentManifest load_manifest(const std::filesystem::path& path, std::uint64_t seed_base) {
  std::ifstream f(path);
  if (!f) throw InvalidParameter("cannot open manifest " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_manifest(ss.str(), seed_base);
}

std::string bundled_manifest(const std::string& name) {
  if (name == "table-init-1d") return kTableInit1d;
  throw InvalidParameter("no bundled manifest named '" + name + "'");
}

std::string results_csv_header() {
  return "id,problem,formulation,activation,epsilon,architecture,backend,pieces,order,"
         "merge_threshold,n_domain,n_boundary,refresh_every,learning_rate,epochs,beta,runs,"
         "aborted,error_min,error_avg,error_std,error_max,avg_domain_points,"
         "avg_boundary_points,avg_seconds\n";
}

std::vector<Vec2> pointwise_grid(const ConvexDomain& domain) {
  std::vector<Vec2> out;
  if (domain.dim() == 1) {
    for (const auto& s : domain.segments()) {
      for (int i = 0; i <= 200; ++i) out.push_back({s.lo + s.length() * i / 200.0, 0.0});
    }
    return out;
  }
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& p : domain.polygons()) {
    for (const Vec2 v : p.vertices()) {
      x0 = std::min(x0, v.x);
      x1 = std::max(x1, v.x);
      y0 = std::min(y0, v.y);
      y1 = std::max(y1, v.y);
    }
  }
  for (int j = 0; j <= 100; ++j) {
    for (int i = 0; i <= 100; ++i) {
      const Vec2 p{x0 + (x1 - x0) * i / 100.0, y0 + (y1 - y0) * j / 100.0};
      for (const auto& poly : domain.polygons()) {
        if (poly.contains(p, 1e-12)) {
          out.push_back(p);
          break;
        }
      }
    }
  }
  return out;
}

int run_manifest(const ExperimentManifest& manifest, const std::filesystem::path& out_dir,
                 int workers, std::ostream& log) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  if (manifest.emit.curves) fs::create_directories(out_dir / "curves");
  if (manifest.emit.pointwise) fs::create_directories(out_dir / "pointwise");
  if (manifest.emit.mesh) fs::create_directories(out_dir / "mesh");

  std::vector<TrainConfig> configs;
  for (const auto& g : manifest.groups) configs.insert(configs.end(), g.runs.begin(), g.runs.end());
  std::size_t done = 0;
  const auto records = run_all(configs, workers, [&](const RunRecord& r) {
    ++done;
    log << "[" << done << "/" << configs.size() << "] " << r.id;
    if (r.aborted) {
      log << " ABORTED: " << r.message << '\n';
    } else {
      log << " loss " << fmt(r.final_loss());
      if (r.final_error) log << " error " << fmt(*r.final_error);
      log << " points " << fmt(r.avg_domain_points) << " time " << fmt(r.wall_seconds) << "s\n";
    }
  });

  int aborted = 0;
  std::string results = results_csv_header();
  std::size_t pos = 0;
  for (const auto& g : manifest.groups) {
    const std::span<const RunRecord> group(records.data() + pos, g.runs.size());
    results += results_row(g, group);
    for (std::size_t k = 0; k < g.runs.size(); ++k) {
      const RunRecord& r = group[k];
      if (r.aborted) {
        ++aborted;
        continue;
      }
      if (manifest.emit.curves) write_file(out_dir / "curves" / (r.id + ".csv"), curve_csv(r));
      if (manifest.emit.pointwise) {
        write_file(out_dir / "pointwise" / (r.id + ".csv"), pointwise_csv(g.runs[k], r));
      }
      if (manifest.emit.mesh && r.last_mesh) {
        write_file(out_dir / "mesh" / (r.id + ".json"), to_json(*r.last_mesh));
      }
    }
    pos += g.runs.size();
  }
  write_file(out_dir / "results.csv", results);
  return aborted;
}

}  // namespace aqnn
