#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "aqnn/activation.hpp"
#include "aqnn/cpwl.hpp"

namespace aqnn {

using Architecture = std::vector<int>;

// Throws InvalidParameter unless n0 in {1, 2}, nL = 1 and all widths >= 1.
void validate_architecture(const Architecture& arch);
std::size_t param_count(const Architecture& arch);

struct NetworkParams {
  Architecture architecture;
  std::vector<Eigen::MatrixXd> weights;  // weights[k] is n_{k+1} x n_k
  std::vector<Eigen::VectorXd> biases;
  SmoothActivation activation;

  int input_dim() const { return architecture.front(); }
  std::size_t layers() const { return weights.size(); }

  // Flat order: W1 row-major, b1, W2 row-major, b2, ...
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);
};

// Glorot-uniform weights, biases uniform in +-1/sqrt(fan_in); a pure
// function of (architecture, seed).
NetworkParams init_params(const Architecture& arch, const SmoothActivation& activation,
                          std::uint64_t seed);

// u(x) with the smooth activation.
double evaluate(const NetworkParams& params, const Eigen::VectorXd& x);
// u at a batch of points, one column per point.
Eigen::RowVectorXd evaluate_batch(const NetworkParams& params, const Eigen::MatrixXd& points);
// pi[u](x): same parameters, activation replaced by the CPWL surrogate.
double evaluate_surrogate(const NetworkParams& params, const CpwlFunction& surrogate,
                          const Eigen::VectorXd& x);
// Piece index of every hidden neuron under the surrogate network.
std::vector<int> activation_pattern(const NetworkParams& params, const CpwlFunction& surrogate,
                                    const Eigen::VectorXd& x);

struct JetEvaluation {
  double value;
  Eigen::VectorXd gradient;
  double laplacian;
};

JetEvaluation forward_jet(const NetworkParams& params, const Eigen::VectorXd& x);

// Jets at a batch of points (one column per point), with the intermediates
// needed to back-propagate through value, gradient and Laplacian.
class JetTape {
 public:
  JetTape(const NetworkParams& params, const Eigen::MatrixXd& points, bool with_laplacian = true);

  Eigen::Index size() const { return points_.cols(); }
  int dim() const { return static_cast<int>(points_.rows()); }
  const Eigen::MatrixXd& points() const { return points_; }
  const Eigen::RowVectorXd& values() const { return value_; }
  // dim x N
  const Eigen::MatrixXd& gradients() const { return gradient_; }
  const Eigen::RowVectorXd& laplacians() const { return laplacian_; }
  bool has_laplacian() const { return with_laplacian_; }

  struct Seeds {
    Eigen::RowVectorXd value;      // dLoss/du per point
    Eigen::MatrixXd gradient;      // dLoss/d(grad u), dim x N
    Eigen::RowVectorXd laplacian;  // dLoss/d(lap u); may be empty
  };

  // Parameter gradient (flat order of NetworkParams::flatten) of a loss
  // whose partial derivatives w.r.t. the jets are given by `seeds`.
  Eigen::VectorXd backward(const Seeds& seeds) const;

 private:
  struct Layer {
    Eigen::MatrixXd a;                 // activations, n x N
    std::vector<Eigen::MatrixXd> g;    // spatial gradient per input direction
    Eigen::MatrixXd l;                 // Laplacian
    Eigen::MatrixXd d1, d2, d3;        // rho', rho'', rho''' at pre-activations
    std::vector<Eigen::MatrixXd> gz;   // gradients of pre-activations
    Eigen::MatrixXd lz;                // Laplacian of pre-activations
  };

  const NetworkParams* params_;
  Eigen::MatrixXd points_;
  bool with_laplacian_;
  std::vector<Layer> layers_;  // hidden layers only
  Eigen::RowVectorXd value_;
  Eigen::MatrixXd gradient_;
  Eigen::RowVectorXd laplacian_;
};

struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t step = 0;
  Eigen::VectorXd m;
  Eigen::VectorXd v;
};

AdamState make_adam(std::size_t n, double learning_rate);
void adam_step(AdamState& state, NetworkParams& params, const Eigen::VectorXd& grad);

// Constant of the bound sup|u - pi[u]| <= C * sup|rho - pi[rho]|, from the
// layer recursion C <- C * ||Theta||_{inf,1} (affine maps) and
// C <- C * Lip(rho) + 1 (activations), starting from C = 0.
double surrogate_error_constant(const NetworkParams& params);

}  // namespace aqnn
