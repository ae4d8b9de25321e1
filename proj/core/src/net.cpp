#include "aqnn/net.hpp"

#include <cmath>
#include <random>

#include "aqnn/error.hpp"

namespace aqnn {
namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void apply_activation(const SmoothActivation& act, const Eigen::MatrixXd& z, Eigen::MatrixXd& a,
                      Eigen::MatrixXd* d1, Eigen::MatrixXd* d2, Eigen::MatrixXd* d3) {
  a.resize(z.rows(), z.cols());
  if (d1) d1->resize(z.rows(), z.cols());
  if (d2) d2->resize(z.rows(), z.cols());
  if (d3) d3->resize(z.rows(), z.cols());
  const Eigen::Index n = z.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    act.eval(z.data()[i], a.data() + i, d1 ? d1->data() + i : nullptr,
             d2 ? d2->data() + i : nullptr, d3 ? d3->data() + i : nullptr);
  }
}

}  // namespace

void validate_architecture(const Architecture& arch) {
  if (arch.size() < 2) throw InvalidParameter("architecture needs at least two layers");
  if (arch.front() != 1 && arch.front() != 2) throw InvalidParameter("input dimension must be 1 or 2");
  if (arch.back() != 1) throw InvalidParameter("output dimension must be 1");
  for (const int n : arch) {
    if (n < 1) throw InvalidParameter("layer widths must be positive");
  }
}

std::size_t param_count(const Architecture& arch) {
  validate_architecture(arch);
  std::size_t n = 0;
  for (std::size_t k = 1; k < arch.size(); ++k) {
    n += static_cast<std::size_t>(arch[k]) * static_cast<std::size_t>(arch[k - 1] + 1);
  }
  return n;
}

Eigen::VectorXd NetworkParams::flatten() const {
  Eigen::VectorXd out(param_count(architecture));
  Eigen::Index pos = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const auto& w = weights[k];
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) out[pos++] = w(i, j);
    }
    for (Eigen::Index i = 0; i < biases[k].size(); ++i) out[pos++] = biases[k][i];
  }
  return out;
}

void NetworkParams::assign(const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != param_count(architecture)) {
    throw InvalidParameter("flat parameter vector has the wrong length");
  }
  Eigen::Index pos = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    auto& w = weights[k];
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = flat[pos++];
    }
    for (Eigen::Index i = 0; i < biases[k].size(); ++i) biases[k][i] = flat[pos++];
  }
}

NetworkParams init_params(const Architecture& arch, const SmoothActivation& activation,
                          std::uint64_t seed) {
  validate_architecture(arch);
  NetworkParams p{arch, {}, {}, activation};
  std::mt19937_64 rng(seed);
  for (std::size_t k = 1; k < arch.size(); ++k) {
    const int fan_in = arch[k - 1], fan_out = arch[k];
    const double wlim = std::sqrt(6.0 / (fan_in + fan_out));
    const double blim = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int i = 0; i < fan_out; ++i) {
      for (int j = 0; j < fan_in; ++j) w(i, j) = wlim * (2.0 * unit_uniform(rng) - 1.0);
    }
    Eigen::VectorXd b(fan_out);
    for (int i = 0; i < fan_out; ++i) b[i] = blim * (2.0 * unit_uniform(rng) - 1.0);
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  return p;
}

double evaluate(const NetworkParams& params, const Eigen::VectorXd& x) {
  Eigen::VectorXd a = x;
  const std::size_t L = params.layers();
  for (std::size_t k = 0; k < L; ++k) {
    Eigen::VectorXd z = params.weights[k] * a + params.biases[k];
    if (k + 1 < L) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = params.activation.value(z[i]);
    }
    a = std::move(z);
  }
  return a[0];
}

Eigen::RowVectorXd evaluate_batch(const NetworkParams& params, const Eigen::MatrixXd& points) {
  Eigen::MatrixXd a = points;
  const std::size_t L = params.layers();
  for (std::size_t k = 0; k < L; ++k) {
    Eigen::MatrixXd z = params.weights[k] * a;
    z.colwise() += params.biases[k];
    if (k + 1 < L) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = params.activation.value(z.data()[i]);
    }
    a = std::move(z);
  }
  return a.row(0);
}

double evaluate_surrogate(const NetworkParams& params, const CpwlFunction& surrogate,
                          const Eigen::VectorXd& x) {
  Eigen::VectorXd a = x;
  const std::size_t L = params.layers();
  for (std::size_t k = 0; k < L; ++k) {
    Eigen::VectorXd z = params.weights[k] * a + params.biases[k];
    if (k + 1 < L) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = surrogate(z[i]);
    }
    a = std::move(z);
  }
  return a[0];
}

std::vector<int> activation_pattern(const NetworkParams& params, const CpwlFunction& surrogate,
                                    const Eigen::VectorXd& x) {
  std::vector<int> pattern;
  Eigen::VectorXd a = x;
  for (std::size_t k = 0; k + 1 < params.layers(); ++k) {
    Eigen::VectorXd z = params.weights[k] * a + params.biases[k];
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const auto e = surrogate.eval(z[i]);
      pattern.push_back(static_cast<int>(e.piece));
      z[i] = e.value;
    }
    a = std::move(z);
  }
  return pattern;
}

JetEvaluation forward_jet(const NetworkParams& params, const Eigen::VectorXd& x) {
  const JetTape tape(params, Eigen::MatrixXd(x));
  return {tape.values()[0], tape.gradients().col(0), tape.laplacians()[0]};
}

// ---- JetTape --------------------------------------------------------------------

JetTape::JetTape(const NetworkParams& params, const Eigen::MatrixXd& points, bool with_laplacian)
    : params_(&params), points_(points), with_laplacian_(with_laplacian) {
  const int d = static_cast<int>(points.rows());
  if (d != params.input_dim()) throw InvalidParameter("point dimension does not match the network");
  const Eigen::Index N = points.cols();
  const std::size_t L = params.layers();

  // Input layer: a = x, grad_j = e_j, Laplacian = 0.
  Eigen::MatrixXd a = points;
  std::vector<Eigen::MatrixXd> g(d);
  for (int j = 0; j < d; ++j) {
    g[j] = Eigen::MatrixXd::Zero(d, N);
    g[j].row(j).setOnes();
  }
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(d, N);

  layers_.resize(L - 1);
  for (std::size_t k = 0; k + 1 < L; ++k) {
    const auto& W = params.weights[k];
    Layer& layer = layers_[k];
    Eigen::MatrixXd z = W * a;
    z.colwise() += params.biases[k];
    layer.gz.resize(d);
    for (int j = 0; j < d; ++j) layer.gz[j] = W * g[j];
    apply_activation(params.activation, z, layer.a, &layer.d1, &layer.d2,
                     with_laplacian ? &layer.d3 : nullptr);
    layer.g.resize(d);
    for (int j = 0; j < d; ++j) layer.g[j] = layer.d1.cwiseProduct(layer.gz[j]);
    if (with_laplacian) {
      layer.lz = W * l;
      Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(z.rows(), N);
      for (int j = 0; j < d; ++j) sq += layer.gz[j].cwiseAbs2();
      layer.l = layer.d2.cwiseProduct(sq) + layer.d1.cwiseProduct(layer.lz);
    }
    a = layer.a;
    g = layer.g;
    if (with_laplacian) l = layer.l;
  }
  const auto& W = params.weights[L - 1];
  value_ = (W * a).row(0).array() + params.biases[L - 1][0];
  gradient_.resize(d, N);
  for (int j = 0; j < d; ++j) gradient_.row(j) = W.row(0) * g[j];
  if (with_laplacian) laplacian_ = W.row(0) * l;
}

Eigen::VectorXd JetTape::backward(const Seeds& seeds) const {
  const NetworkParams& params = *params_;
  const int d = dim();
  const Eigen::Index N = size();
  const std::size_t L = params.layers();
  const bool use_lap = with_laplacian_ && seeds.laplacian.size() == N;
  const bool use_grad = seeds.gradient.size() == d * N;
  const bool use_val = seeds.value.size() == N;

  std::vector<Eigen::MatrixXd> dW(L);
  std::vector<Eigen::VectorXd> db(L);

  // Output layer (linear).
  const Eigen::MatrixXd& a_prev = L >= 2 ? layers_[L - 2].a : points_;
  const auto& W_out = params.weights[L - 1];
  dW[L - 1] = Eigen::MatrixXd::Zero(W_out.rows(), W_out.cols());
  db[L - 1] = Eigen::VectorXd::Zero(1);
  Eigen::MatrixXd abar = Eigen::MatrixXd::Zero(W_out.cols(), N);
  std::vector<Eigen::MatrixXd> gbar(d, Eigen::MatrixXd::Zero(W_out.cols(), N));
  Eigen::MatrixXd lbar = Eigen::MatrixXd::Zero(W_out.cols(), N);
  if (use_val) {
    dW[L - 1] += seeds.value * a_prev.transpose();
    db[L - 1][0] = seeds.value.sum();
    abar = W_out.row(0).transpose() * seeds.value;
  }
  if (use_grad) {
    for (int j = 0; j < d; ++j) {
      if (L >= 2) {
        dW[L - 1] += seeds.gradient.row(j) * layers_[L - 2].g[j].transpose();
      } else {
        dW[L - 1](0, j) += seeds.gradient.row(j).sum();
      }
      gbar[j] = W_out.row(0).transpose() * seeds.gradient.row(j);
    }
  }
  if (use_lap && L >= 2) {
    dW[L - 1] += seeds.laplacian * layers_[L - 2].l.transpose();
    lbar = W_out.row(0).transpose() * seeds.laplacian;
  }

  for (std::size_t kk = L - 1; kk-- > 0;) {
    const Layer& layer = layers_[kk];
    const auto& W = params.weights[kk];
    // Through the activation: a = rho(z), g = rho'(z) gz,
    // l = rho''(z) |gz|^2 + rho'(z) lz.
    Eigen::MatrixXd zbar = abar.cwiseProduct(layer.d1);
    std::vector<Eigen::MatrixXd> gzbar(d);
    for (int j = 0; j < d; ++j) {
      zbar += gbar[j].cwiseProduct(layer.gz[j]).cwiseProduct(layer.d2);
      gzbar[j] = gbar[j].cwiseProduct(layer.d1);
    }
    Eigen::MatrixXd lzbar;
    if (use_lap) {
      Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(W.rows(), N);
      for (int j = 0; j < d; ++j) sq += layer.gz[j].cwiseAbs2();
      zbar += lbar.cwiseProduct(layer.d3.cwiseProduct(sq) + layer.d2.cwiseProduct(layer.lz));
      const Eigen::MatrixXd two_l_d2 = 2.0 * lbar.cwiseProduct(layer.d2);
      for (int j = 0; j < d; ++j) gzbar[j] += two_l_d2.cwiseProduct(layer.gz[j]);
      lzbar = lbar.cwiseProduct(layer.d1);
    }
    // Through the affine map: z = W a + b, gz = W g, lz = W l.
    if (kk > 0) {
      const Layer& prev = layers_[kk - 1];
      dW[kk] = zbar * prev.a.transpose();
      for (int j = 0; j < d; ++j) dW[kk] += gzbar[j] * prev.g[j].transpose();
      if (use_lap) dW[kk] += lzbar * prev.l.transpose();
      abar = W.transpose() * zbar;
      for (int j = 0; j < d; ++j) gbar[j] = W.transpose() * gzbar[j];
      if (use_lap) lbar = W.transpose() * lzbar;
    } else {
      // Inputs: a = x, g_j = e_j, l = 0.
      dW[kk] = zbar * points_.transpose();
      for (int j = 0; j < d; ++j) dW[kk].col(j) += gzbar[j].rowwise().sum();
    }
    db[kk] = zbar.rowwise().sum();
  }

  Eigen::VectorXd out(param_count(params.architecture));
  Eigen::Index pos = 0;
  for (std::size_t k = 0; k < L; ++k) {
    for (Eigen::Index i = 0; i < dW[k].rows(); ++i) {
      for (Eigen::Index j = 0; j < dW[k].cols(); ++j) out[pos++] = dW[k](i, j);
    }
    for (Eigen::Index i = 0; i < db[k].size(); ++i) out[pos++] = db[k][i];
  }
  return out;
}

// ---- Adam -----------------------------------------------------------------------

AdamState make_adam(std::size_t n, double learning_rate) {
  AdamState s;
  s.learning_rate = learning_rate;
  s.m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  s.v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  return s;
}

void adam_step(AdamState& state, NetworkParams& params, const Eigen::VectorXd& grad) {
  if (state.m.size() != grad.size()) {
    state.m = Eigen::VectorXd::Zero(grad.size());
    state.v = Eigen::VectorXd::Zero(grad.size());
  }
  ++state.step;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const Eigen::VectorXd update =
      (state.m / c1).array() / ((state.v / c2).array().sqrt() + state.eps);
  params.assign(params.flatten() - state.learning_rate * update);
}

double surrogate_error_constant(const NetworkParams& params) {
  double c = 0.0;
  const std::size_t L = params.layers();
  for (std::size_t k = 0; k < L; ++k) {
    c *= params.weights[k].cwiseAbs().rowwise().sum().maxCoeff();
    if (k + 1 < L) c = c * params.activation.lipschitz() + 1.0;
  }
  return c;
}

}  // namespace aqnn
