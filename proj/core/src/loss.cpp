#include "aqnn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "aqnn/error.hpp"
#include "aqnn/quadrature.hpp"

namespace aqnn {
namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Index drawn with probability proportional to cumulative[i] - cumulative[i-1].
std::size_t draw(const std::vector<double>& cumulative, std::mt19937_64& rng) {
  const double r = unit_uniform(rng) * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

Eigen::MatrixXd to_matrix(const std::vector<Vec2>& pts, int dim) {
  Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    m(0, static_cast<Eigen::Index>(i)) = pts[i].x;
    if (dim == 2) m(1, static_cast<Eigen::Index>(i)) = pts[i].y;
  }
  return m;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vec2 column(const Eigen::MatrixXd& m, Eigen::Index j) {
  return m.rows() == 2 ? Vec2{m(0, j), m(1, j)} : Vec2{m(0, j), 0.0};
}

PointJets tape_jets(const JetTape& tape) {
  return {tape.values(), tape.gradients(), tape.laplacians()};
}

}  // namespace

IntegrationPoints aq_points(const AdaptedMesh& mesh, int order) {
  const int d = mesh.dim;
  MappedPoints dom;
  for (const QuadCell& cell : quadrature_ready_cells(mesh)) {
    map_rule(rule(cell.shape, order), cell, dom);
  }
  std::vector<Vec2> bpts, normals;
  std::vector<double> bw;
  const QuadratureRule& seg = rule(Shape::Segment, order);
  for (const BoundaryRegion& b : mesh.boundary_cells) {
    if (b.is_point) {
      bpts.push_back(b.a);
      normals.push_back(b.normal);
      bw.push_back(1.0);
      continue;
    }
    const double half = 0.5 * b.measure();
    for (std::size_t q = 0; q < seg.points.size(); ++q) {
      const double t = 0.5 * (1.0 + seg.points[q].x);
      bpts.push_back(b.a + (b.b - b.a) * t);
      normals.push_back(b.normal);
      bw.push_back(seg.weights[q] * half);
    }
  }
  IntegrationPoints out;
  out.domain_points = to_matrix(dom.points, d);
  out.domain_weights = to_vector(dom.weights);
  out.boundary_points = to_matrix(bpts, d);
  out.boundary_normals = to_matrix(normals, d);
  out.boundary_weights = to_vector(bw);
  return out;
}

IntegrationPoints mc_points(const ConvexDomain& domain, int n_domain, int n_boundary,
                            std::uint64_t seed) {
  if (n_domain < 1) throw InvalidParameter("MC needs at least one domain point");
  const int d = domain.dim();
  if (d == 2 && n_boundary < 1) throw InvalidParameter("MC needs at least one boundary point");
  std::mt19937_64 rng(seed);
  std::vector<Vec2> dom;
  dom.reserve(static_cast<std::size_t>(n_domain));
  if (d == 1) {
    std::vector<double> cum;
    for (const auto& s : domain.segments()) cum.push_back((cum.empty() ? 0.0 : cum.back()) + s.length());
    for (int i = 0; i < n_domain; ++i) {
      const Segment1D& s = domain.segments()[draw(cum, rng)];
      dom.push_back({s.lo + s.length() * unit_uniform(rng), 0.0});
    }
  } else {
    std::vector<std::array<Vec2, 3>> tris;
    std::vector<double> cum;
    for (const auto& p : domain.polygons()) {
      const auto& v = p.vertices();
      for (std::size_t k = 1; k + 1 < v.size(); ++k) {
        tris.push_back({v[0], v[k], v[k + 1]});
        const double area = 0.5 * cross(v[k] - v[0], v[k + 1] - v[0]);
        cum.push_back((cum.empty() ? 0.0 : cum.back()) + area);
      }
    }
    for (int i = 0; i < n_domain; ++i) {
      const auto& t = tris[draw(cum, rng)];
      double r1 = unit_uniform(rng), r2 = unit_uniform(rng);
      if (r1 + r2 > 1.0) {
        r1 = 1.0 - r1;
        r2 = 1.0 - r2;
      }
      dom.push_back(t[0] + (t[1] - t[0]) * r1 + (t[2] - t[0]) * r2);
    }
  }

  std::vector<Vec2> bpts, normals;
  std::vector<double> bw;
  if (d == 1) {
    for (const auto& e : domain.boundary()) {
      bpts.push_back(e.a);
      normals.push_back(e.normal);
      bw.push_back(1.0);
    }
  } else {
    std::vector<double> cum;
    for (const auto& e : domain.boundary()) {
      cum.push_back((cum.empty() ? 0.0 : cum.back()) + norm(e.b - e.a));
    }
    const double w = domain.boundary_measure() / n_boundary;
    for (int i = 0; i < n_boundary; ++i) {
      const auto& e = domain.boundary()[draw(cum, rng)];
      bpts.push_back(e.a + (e.b - e.a) * unit_uniform(rng));
      normals.push_back(e.normal);
      bw.push_back(w);
    }
  }

  IntegrationPoints out;
  out.domain_points = to_matrix(dom, d);
  out.domain_weights = Eigen::VectorXd::Constant(n_domain, domain.measure() / n_domain);
  out.boundary_points = to_matrix(bpts, d);
  out.boundary_normals = to_matrix(normals, d);
  out.boundary_weights = to_vector(bw);
  return out;
}

void attach_data(IntegrationPoints& pts, const PoissonProblem& problem) {
  pts.forcing.resize(pts.domain_size());
  for (Eigen::Index j = 0; j < pts.domain_size(); ++j) {
    pts.forcing[j] = problem.forcing(column(pts.domain_points, j));
  }
  pts.boundary_data.resize(pts.boundary_size());
  for (Eigen::Index j = 0; j < pts.boundary_size(); ++j) {
    pts.boundary_data[j] = problem.boundary_data(column(pts.boundary_points, j));
  }
}

PointJets field_jets(const std::function<Jet(Vec2)>& field, const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.cols();
  const int d = static_cast<int>(points.rows());
  PointJets out{Eigen::RowVectorXd(n), Eigen::MatrixXd(d, n), Eigen::RowVectorXd(n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const Jet J = field(column(points, j));
    out.value[j] = J.value;
    out.gradient(0, j) = J.gradient.x;
    if (d == 2) out.gradient(1, j) = J.gradient.y;
    out.laplacian[j] = J.laplacian;
  }
  return out;
}

double strong_energy(const PointJets& domain, const PointJets& boundary,
                     const IntegrationPoints& pts, double beta) {
  const Eigen::ArrayXd r = domain.laplacian.transpose().array() + pts.forcing.array();
  const Eigen::ArrayXd e = boundary.value.transpose().array() - pts.boundary_data.array();
  return 0.5 * (pts.domain_weights.array() * r.square()).sum() +
         0.5 * beta * (pts.boundary_weights.array() * e.square()).sum();
}

double weak_energy(const PointJets& domain, const PointJets& boundary,
                   const IntegrationPoints& pts, double beta) {
  const Eigen::ArrayXd grad_sq = domain.gradient.colwise().squaredNorm().transpose().array();
  const Eigen::ArrayXd fu = pts.forcing.array() * domain.value.transpose().array();
  const double dom = (pts.domain_weights.array() * (0.5 * grad_sq - fu)).sum();
  const Eigen::ArrayXd dn =
      boundary.gradient.cwiseProduct(pts.boundary_normals).colwise().sum().transpose().array();
  const Eigen::ArrayXd u = boundary.value.transpose().array();
  const Eigen::ArrayXd g = pts.boundary_data.array();
  const Eigen::ArrayXd bnd = -dn * u + 0.5 * beta * u.square() + g * dn - beta * g * u;
  return dom + (pts.boundary_weights.array() * bnd).sum();
}

double energy(const PoissonProblem& problem, const PointJets& domain, const PointJets& boundary,
              const IntegrationPoints& pts) {
  return problem.formulation == Formulation::Strong
             ? strong_energy(domain, boundary, pts, problem.beta)
             : weak_energy(domain, boundary, pts, problem.beta);
}

LossEvaluation loss_and_gradient(const NetworkParams& params, const PoissonProblem& problem,
                                 const IntegrationPoints& pts) {
  const bool strong = problem.formulation == Formulation::Strong;
  const JetTape dom(params, pts.domain_points, strong);
  const JetTape bnd(params, pts.boundary_points, false);
  const double beta = problem.beta;
  const double value = energy(problem, tape_jets(dom), tape_jets(bnd), pts);

  const Eigen::RowVectorXd wd = pts.domain_weights.transpose();
  const Eigen::RowVectorXd wb = pts.boundary_weights.transpose();
  const Eigen::RowVectorXd g = pts.boundary_data.transpose();
  JetTape::Seeds sd, sb;
  if (strong) {
    sd.laplacian = wd.cwiseProduct(dom.laplacians() + pts.forcing.transpose());
    sb.value = beta * wb.cwiseProduct(bnd.values() - g);
  } else {
    sd.value = -wd.cwiseProduct(pts.forcing.transpose());
    sd.gradient = dom.gradients().array().rowwise() * wd.array();
    const Eigen::RowVectorXd dn =
        bnd.gradients().cwiseProduct(pts.boundary_normals).colwise().sum();
    sb.value = wb.cwiseProduct(-dn + beta * (bnd.values() - g));
    const Eigen::RowVectorXd coef = wb.cwiseProduct(g - bnd.values());
    sb.gradient = pts.boundary_normals.array().rowwise() * coef.array();
  }
  return {value, dom.backward(sd) + bnd.backward(sb)};
}

double loss_value(const NetworkParams& params, const PoissonProblem& problem,
                  const IntegrationPoints& pts) {
  const bool strong = problem.formulation == Formulation::Strong;
  const JetTape dom(params, pts.domain_points, strong);
  const JetTape bnd(params, pts.boundary_points, false);
  return energy(problem, tape_jets(dom), tape_jets(bnd), pts);
}

// ---- error metric -----------------------------------------------------------------

L2ErrorEvaluator::L2ErrorEvaluator(const PoissonProblem& problem) {
  if (!problem.has_exact()) {
    throw UnsupportedMetric("problem '" + problem.name + "' has no closed-form solution");
  }
  constexpr int kCells = 100;
  constexpr int kOrder = 10;
  const int d = problem.dim();
  std::vector<QuadCell> cells;
  if (d == 1) {
    for (const auto& s : problem.domain.segments()) {
      const double h = s.length() / kCells;
      for (int i = 0; i < kCells; ++i) {
        cells.push_back(make_segment_cell(s.lo + i * h, i + 1 == kCells ? s.hi : s.lo + (i + 1) * h));
      }
    }
  } else {
    std::vector<Vec2> all;
    for (const auto& p : problem.domain.polygons()) {
      all.insert(all.end(), p.vertices().begin(), p.vertices().end());
    }
    double x0 = all[0].x, x1 = x0, y0 = all[0].y, y1 = y0;
    for (const Vec2 v : all) {
      x0 = std::min(x0, v.x);
      x1 = std::max(x1, v.x);
      y0 = std::min(y0, v.y);
      y1 = std::max(y1, v.y);
    }
    const double hx = (x1 - x0) / kCells, hy = (y1 - y0) / kCells;
    for (const auto& part : problem.domain.polygons()) {
      const auto& pv = part.vertices();
      for (int i = 0; i < kCells; ++i) {
        for (int j = 0; j < kCells; ++j) {
          const double a = x0 + i * hx, b = i + 1 == kCells ? x1 : x0 + (i + 1) * hx;
          const double c = y0 + j * hy, e = j + 1 == kCells ? y1 : y0 + (j + 1) * hy;
          std::optional<ConvexPolygon> piece = ConvexPolygon({{a, c}, {b, c}, {b, e}, {a, e}});
          for (std::size_t k = 0; k < pv.size() && piece; ++k) {
            const Vec2 p = pv[k], q = pv[(k + 1) % pv.size()];
            const Vec2 w{q.y - p.y, p.x - q.x};
            piece = split_by_line(*piece, w, dot(w, p)).first;
          }
          if (!piece) continue;
          for (const auto& sub : split_convex(*piece)) cells.push_back(make_polygon_cell(sub));
        }
      }
    }
  }
  MappedPoints mp;
  for (const auto& cell : cells) map_rule(rule(cell.shape, kOrder), cell, mp);
  points_ = to_matrix(mp.points, d);
  weights_ = to_vector(mp.weights).transpose();
  exact_.resize(points_.cols());
  for (Eigen::Index j = 0; j < points_.cols(); ++j) exact_[j] = problem.exact(column(points_, j)).value;
  exact_norm_ = std::sqrt((weights_.array() * exact_.array().square()).sum());
}

double L2ErrorEvaluator::from_values(const Eigen::RowVectorXd& u) const {
  const double err = std::sqrt((weights_.array() * (u - exact_).array().square()).sum());
  return err / exact_norm_;
}

double L2ErrorEvaluator::operator()(const NetworkParams& params) const {
  return from_values(evaluate_batch(params, points_));
}

double L2ErrorEvaluator::operator()(
    const std::function<Eigen::RowVectorXd(const Eigen::MatrixXd&)>& u) const {
  return from_values(u(points_));
}

double relative_l2_error(const NetworkParams& params, const PoissonProblem& problem) {
  return L2ErrorEvaluator(problem)(params);
}

}  // namespace aqnn
