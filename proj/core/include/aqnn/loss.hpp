#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "aqnn/mesh.hpp"
#include "aqnn/net.hpp"
#include "aqnn/problem.hpp"

namespace aqnn {

// Integration points and weights on the domain and its boundary, with the
// problem data cached at those points. Points are stored one per column.
struct IntegrationPoints {
  Eigen::MatrixXd domain_points;
  Eigen::VectorXd domain_weights;
  Eigen::MatrixXd boundary_points;
  Eigen::MatrixXd boundary_normals;
  Eigen::VectorXd boundary_weights;
  Eigen::VectorXd forcing;        // f at the domain points
  Eigen::VectorXd boundary_data;  // g at the boundary points

  Eigen::Index domain_size() const { return domain_points.cols(); }
  Eigen::Index boundary_size() const { return boundary_points.cols(); }
};

// Gaussian points of the given order on every cell of the adapted mesh
// (domain and boundary). 1D boundary points carry unit weight.
IntegrationPoints aq_points(const AdaptedMesh& mesh, int order);

// Uniform samples: a triangle (or segment) is drawn with probability
// proportional to its measure, then a uniform point in it. Domain weights
// are |domain| / n_domain, boundary weights |boundary| / n_boundary. In 1D
// the boundary is the set of endpoints, each with weight 1, and n_boundary
// is ignored.
IntegrationPoints mc_points(const ConvexDomain& domain, int n_domain, int n_boundary,
                            std::uint64_t seed);

// Fills forcing and boundary_data from the problem.
void attach_data(IntegrationPoints& pts, const PoissonProblem& problem);

// Value, gradient (dim x N) and Laplacian of a field at a set of points.
struct PointJets {
  Eigen::RowVectorXd value;
  Eigen::MatrixXd gradient;
  Eigen::RowVectorXd laplacian;
};

PointJets field_jets(const std::function<Jet(Vec2)>& field, const Eigen::MatrixXd& points);

// 1/2 ||lap u + f||^2 + beta/2 ||u - g||^2 on the boundary.
double strong_energy(const PointJets& domain, const PointJets& boundary,
                     const IntegrationPoints& pts, double beta);

// 1/2 a(u, u) - l(u) with the symmetric Nitsche forms.
double weak_energy(const PointJets& domain, const PointJets& boundary,
                   const IntegrationPoints& pts, double beta);

double energy(const PoissonProblem& problem, const PointJets& domain, const PointJets& boundary,
              const IntegrationPoints& pts);

struct LossEvaluation {
  double value;
  Eigen::VectorXd gradient;  // flat parameter order
};

// Energy of the network on the given points and its parameter gradient.
LossEvaluation loss_and_gradient(const NetworkParams& params, const PoissonProblem& problem,
                                 const IntegrationPoints& pts);
double loss_value(const NetworkParams& params, const PoissonProblem& problem,
                  const IntegrationPoints& pts);

// Relative L2 error ||u - u_exact|| / ||u_exact|| with an order-10 rule on a
// fixed grid: 100 uniform cells per 1D part, or a 100 x 100 grid over the
// bounding box clipped to each 2D part. Throws UnsupportedMetric without a
// closed-form solution.
class L2ErrorEvaluator {
 public:
  explicit L2ErrorEvaluator(const PoissonProblem& problem);

  double operator()(const NetworkParams& params) const;
  // `u` maps a dim x N batch of points to N values.
  double operator()(const std::function<Eigen::RowVectorXd(const Eigen::MatrixXd&)>& u) const;

  const Eigen::MatrixXd& points() const { return points_; }

 private:
  double from_values(const Eigen::RowVectorXd& u) const;

  Eigen::MatrixXd points_;
  Eigen::RowVectorXd weights_;
  Eigen::RowVectorXd exact_;
  double exact_norm_;
};

double relative_l2_error(const NetworkParams& params, const PoissonProblem& problem);

}  // namespace aqnn
