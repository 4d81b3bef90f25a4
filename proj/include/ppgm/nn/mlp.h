#pragma once

#include <cstdint>
#include <vector>

#include "ppgm/nn/tape.h"

namespace ppgm::nn {

/// Feedforward network with tanh hidden layers and a linear output layer.
/// Inputs pass through a fixed affine scaling first:
///   input -> inputScale .* input + inputShift.
struct Mlp {
  std::vector<Eigen::Index> dims;
  std::vector<Matrix> W;
  std::vector<Vector> b;
  Vector inputScale;
  Vector inputShift;

  Eigen::Index input_dim() const { return dims.front(); }
  Eigen::Index output_dim() const { return dims.back(); }
  std::size_t parameter_count() const;

  /// Flat parameters: per layer W (column-major) then b.
  Vector params() const;
  void set_params(const Vector& p);

  /// One sample. Throws NumericError on non-finite input.
  Vector forward(const Vector& input) const;
  /// One sample per column.
  Matrix forward_batch(const Matrix& inputs) const;
};

/// sum_i d_i (d_{i-1} + 1).
std::size_t parameter_count(const std::vector<Eigen::Index>& dims);

/// Normal(0, sigma^2) parameters, deterministic in seed; identity input
/// scaling. Requires at least two layer sizes, all positive.
Mlp mlp_init(std::vector<Eigen::Index> dims, std::uint64_t seed, double sigma = 0.1);

/// Network of (t, x) with t mapped to 2t/T - 1 and x to x / xScale.
Mlp time_state_net(Eigen::Index n, Eigen::Index out, std::vector<Eigen::Index> hidden, double horizon,
                   double xScale, std::uint64_t seed, double sigma = 0.1);
/// Network of x alone, x mapped to x / xScale.
Mlp state_net(Eigen::Index n, Eigen::Index out, std::vector<Eigen::Index> hidden, double xScale,
              std::uint64_t seed, double sigma = 0.1);

Vector mlp_forward(const Mlp& net, const Vector& input);

/// Parameter leaves of a network registered on a tape.
struct MlpBinding {
  std::vector<Tape::Var> W;
  std::vector<Tape::Var> b;
};
MlpBinding bind(Tape& tape, const Mlp& net);

/// Records the forward pass of a batch (one sample per column). The inputs
/// are treated as constants.
Tape::Var mlp_record(Tape& tape, const Mlp& net, const MlpBinding& params, const Matrix& inputs);

}  // namespace ppgm::nn
