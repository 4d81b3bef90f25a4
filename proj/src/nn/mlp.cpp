#include "ppgm/nn/mlp.h"

#include <random>

#include "ppgm/core/errors.h"

namespace ppgm::nn {

std::size_t parameter_count(const std::vector<Eigen::Index>& dims) {
  std::size_t total = 0;
  for (std::size_t i = 1; i < dims.size(); ++i) total += static_cast<std::size_t>(dims[i] * (dims[i - 1] + 1));
  return total;
}

std::size_t Mlp::parameter_count() const { return nn::parameter_count(dims); }

Vector Mlp::params() const {
  Vector p(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index off = 0;
  for (std::size_t l = 0; l < W.size(); ++l) {
    p.segment(off, W[l].size()) = W[l].reshaped();
    off += W[l].size();
    p.segment(off, b[l].size()) = b[l];
    off += b[l].size();
  }
  return p;
}

void Mlp::set_params(const Vector& p) {
  if (p.size() != static_cast<Eigen::Index>(parameter_count())) {
    throw UsageError("Mlp::set_params: parameter vector has wrong length");
  }
  Eigen::Index off = 0;
  for (std::size_t l = 0; l < W.size(); ++l) {
    W[l].reshaped() = p.segment(off, W[l].size());
    off += W[l].size();
    b[l] = p.segment(off, b[l].size());
    off += b[l].size();
  }
}

Matrix Mlp::forward_batch(const Matrix& inputs) const {
  if (inputs.rows() != input_dim()) throw UsageError("Mlp::forward: input has wrong dimension");
  if (!inputs.allFinite()) throw NumericError("Mlp::forward: non-finite input");
  Matrix h = (inputs.array().colwise() * inputScale.array()).colwise() + inputShift.array();
  for (std::size_t l = 0; l < W.size(); ++l) {
    Matrix z = (W[l] * h).colwise() + b[l];
    h = (l + 1 < W.size()) ? Matrix(z.array().tanh()) : std::move(z);
  }
  return h;
}

Vector Mlp::forward(const Vector& input) const { return forward_batch(input); }

Vector mlp_forward(const Mlp& net, const Vector& input) { return net.forward(input); }

Mlp mlp_init(std::vector<Eigen::Index> dims, std::uint64_t seed, double sigma) {
  if (dims.size() < 2) throw SpecError("mlp_init: need at least input and output sizes");
  for (auto d : dims) {
    if (d < 1) throw SpecError("mlp_init: layer sizes must be positive");
  }
  if (!(sigma >= 0.0)) throw SpecError("mlp_init: sigma must be non-negative");
  Mlp net;
  net.dims = std::move(dims);
  net.inputScale = Vector::Ones(net.dims.front());
  net.inputShift = Vector::Zero(net.dims.front());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t l = 1; l < net.dims.size(); ++l) {
    Matrix w(net.dims[l], net.dims[l - 1]);
    Vector bias(net.dims[l]);
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = sigma * normal(rng);
    for (Eigen::Index k = 0; k < bias.size(); ++k) bias[k] = sigma * normal(rng);
    net.W.push_back(std::move(w));
    net.b.push_back(std::move(bias));
  }
  return net;
}

namespace {
std::vector<Eigen::Index> layer_dims(Eigen::Index in, const std::vector<Eigen::Index>& hidden, Eigen::Index out) {
  std::vector<Eigen::Index> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}
}  // namespace

Mlp time_state_net(Eigen::Index n, Eigen::Index out, std::vector<Eigen::Index> hidden, double horizon,
                   double xScale, std::uint64_t seed, double sigma) {
  Mlp net = mlp_init(layer_dims(n + 1, hidden, out), seed, sigma);
  net.inputScale.setConstant(1.0 / xScale);
  net.inputScale[0] = 2.0 / horizon;
  net.inputShift[0] = -1.0;
  return net;
}

Mlp state_net(Eigen::Index n, Eigen::Index out, std::vector<Eigen::Index> hidden, double xScale,
              std::uint64_t seed, double sigma) {
  Mlp net = mlp_init(layer_dims(n, hidden, out), seed, sigma);
  net.inputScale.setConstant(1.0 / xScale);
  return net;
}

MlpBinding bind(Tape& tape, const Mlp& net) {
  MlpBinding out;
  for (std::size_t l = 0; l < net.W.size(); ++l) {
    out.W.push_back(tape.parameter(net.W[l]));
    out.b.push_back(tape.parameter(net.b[l]));
  }
  return out;
}

Tape::Var mlp_record(Tape& tape, const Mlp& net, const MlpBinding& params, const Matrix& inputs) {
  if (inputs.rows() != net.input_dim()) throw UsageError("mlp_record: input has wrong dimension");
  if (!inputs.allFinite()) throw NumericError("mlp_record: non-finite input");
  Matrix scaled = (inputs.array().colwise() * net.inputScale.array()).colwise() + net.inputShift.array();
  Tape::Var h = tape.constant(std::move(scaled));
  for (std::size_t l = 0; l < net.W.size(); ++l) {
    h = tape.add_bias(tape.matmul(params.W[l], h), params.b[l]);
    if (l + 1 < net.W.size()) h = tape.tanh(h);
  }
  return h;
}

}  // namespace ppgm::nn
