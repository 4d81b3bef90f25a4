#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace ppgm::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Records a computation over matrices and differentiates a scalar result
/// with respect to the registered parameters in one reverse pass.
///
/// Batched values keep one sample per column. A tape is single-owner and is
/// meant to be discarded after grad().
class Tape {
 public:
  struct Var {
    const Tape* tape = nullptr;
    std::size_t id = 0;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  /// Leaf whose gradient is returned by grad(); registration order fixes
  /// the layout of the gradient vector.
  Var parameter(Matrix value);

  const Matrix& value(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  Var matmul(Var a, Var b);
  /// K a for a fixed matrix K.
  Var left_multiply(const Matrix& K, Var a);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  /// a + bias 1', with a column bias broadcast over the batch.
  Var add_bias(Var a, Var bias);
  Var tanh(Var a);
  Var scale(Var a, double s);
  /// Column j of a times w(j), for a fixed row w (e.g. Brownian increments).
  Var scale_columns(Var a, const RowVector& w);
  /// weight * sum of squared entries, as a 1x1 value.
  Var sum_squares(Var a, double weight);

  /// Gradient of a 1x1 node over all parameters, concatenated column-major
  /// in registration order. Throws UsageError if loss is not a scalar of
  /// this tape.
  Vector grad(Var loss) const;

 private:
  using Backward = std::function<void(const Matrix& g, std::vector<Matrix>& grads)>;
  struct Node {
    Matrix value;
    bool needsGrad = false;
    Backward back;
  };

  Var push(Matrix value, bool needsGrad, Backward back);
  void check(Var v) const;
  bool needs(Var v) const { return nodes_[v.id].needsGrad; }
  static void accumulate(std::vector<Matrix>& grads, std::size_t id, const Matrix& g);

  std::vector<Node> nodes_;
  std::vector<std::size_t> params_;
};

}  // namespace ppgm::nn
