#include "aqnn/json_io.hpp"

#include <cmath>

#include "json.hpp"

namespace aqnn {
namespace {

using nlohmann::json;

json point(Vec2 p) { return json::array({p.x, p.y}); }

json cpwl_json(const CpwlFunction& f) {
  json j;
  j["breakpoints"] = std::vector<double>(f.breakpoints().begin(), f.breakpoints().end());
  json slopes = json::array(), intercepts = json::array();
  for (const Affine1D& p : f.pieces()) {
    slopes.push_back(p.slope);
    intercepts.push_back(p.intercept);
  }
  j["slopes"] = slopes;
  j["intercepts"] = intercepts;
  json tangents = json::array();
  for (const double t : f.tangent_points()) {
    if (std::isfinite(t)) tangents.push_back(t);
  }
  j["tangent_points"] = tangents;
  return j;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string to_json(const CpwlFunction& f) { return cpwl_json(f).dump(2); }

std::string to_json(const AdaptedMesh& mesh) {
  json j;
  j["dim"] = mesh.dim;
  j["epoch"] = mesh.epoch;
  j["median_measure"] = mesh.median_measure;
  j["stats"] = {{"fallback_cuts", mesh.stats.fallback_cuts},
                {"merged_cells", mesh.stats.merged_cells},
                {"stuck_cells", mesh.stats.stuck_cells}};
  json cells = json::array();
  for (const auto& c : mesh.domain_cells) {
    json cell;
    if (c.dim() == 1) {
      cell["interval"] = json::array({c.segment().lo, c.segment().hi});
    } else {
      json verts = json::array();
      for (const Vec2 v : c.polygon().vertices()) verts.push_back(point(v));
      cell["vertices"] = verts;
    }
    cell["measure"] = c.measure();
    cell["has_map"] = c.has_map();
    cells.push_back(cell);
  }
  j["cells"] = cells;
  json boundary = json::array();
  for (const auto& b : mesh.boundary_cells) {
    boundary.push_back({{"a", point(b.a)}, {"b", point(b.b)}, {"normal", point(b.normal)}});
  }
  j["boundary"] = boundary;
  return j.dump(2);
}

std::string to_json(const NetworkParams& params) {
  json j;
  j["architecture"] = params.architecture;
  j["activation"] = params.activation.name();
  if (auto eps = params.activation.epsilon()) j["epsilon"] = *eps;
  json layers = json::array();
  for (std::size_t k = 0; k < params.layers(); ++k) {
    layers.push_back({{"weights", matrix_json(params.weights[k])},
                      {"biases", std::vector<double>(params.biases[k].data(),
                                                     params.biases[k].data() +
                                                         params.biases[k].size())}});
  }
  j["layers"] = layers;
  return j.dump(2);
}

std::string fit_report_json(const SmoothActivation& act, std::span<const CpwlFit> fits) {
  json j;
  j["activation"] = act.name();
  if (auto eps = act.epsilon()) j["epsilon"] = *eps;
  json arr = json::array();
  std::vector<int> pieces;
  std::vector<double> dists;
  for (const CpwlFit& fit : fits) {
    json f = cpwl_json(fit.function);
    f["pieces"] = fit.function.num_pieces();
    f["effective_pieces"] = fit.effective_pieces;
    f["distance"] = fit.distance;
    f["iterations"] = fit.iterations;
    f["symmetric"] = fit.symmetric;
    f["warnings"] = fit.warnings;
    arr.push_back(f);
    pieces.push_back(static_cast<int>(fit.function.num_pieces()));
    dists.push_back(fit.distance);
  }
  j["fits"] = arr;
  if (fits.size() >= 2) j["slope"] = convergence_slope(pieces, dists);
  return j.dump(2);
}

}  // namespace aqnn
