#include "ppgm/nn/tape.h"

#include "ppgm/core/errors.h"

namespace ppgm::nn {

Tape::Var Tape::push(Matrix value, bool needsGrad, Backward back) {
  nodes_.push_back(Node{std::move(value), needsGrad, needsGrad ? std::move(back) : Backward()});
  return Var{this, nodes_.size() - 1};
}

void Tape::check(Var v) const {
  if (v.tape != this || v.id >= nodes_.size()) throw UsageError("Tape: variable does not belong to this tape");
}

void Tape::accumulate(std::vector<Matrix>& grads, std::size_t id, const Matrix& g) {
  if (grads[id].size() == 0) {
    grads[id] = g;
  } else {
    grads[id] += g;
  }
}

Tape::Var Tape::constant(Matrix value) { return push(std::move(value), false, {}); }

Tape::Var Tape::parameter(Matrix value) {
  Var v = push(std::move(value), true, [](const Matrix&, std::vector<Matrix>&) {});
  params_.push_back(v.id);
  return v;
}

const Matrix& Tape::value(Var v) const {
  check(v);
  return nodes_[v.id].value;
}

Tape::Var Tape::matmul(Var a, Var b) {
  check(a);
  check(b);
  const std::size_t ia = a.id, ib = b.id;
  if (nodes_[ia].value.cols() != nodes_[ib].value.rows()) throw UsageError("Tape::matmul: shape mismatch");
  return push(nodes_[ia].value * nodes_[ib].value, needs(a) || needs(b),
              [this, ia, ib](const Matrix& g, std::vector<Matrix>& grads) {
                if (nodes_[ia].needsGrad) accumulate(grads, ia, g * nodes_[ib].value.transpose());
                if (nodes_[ib].needsGrad) accumulate(grads, ib, nodes_[ia].value.transpose() * g);
              });
}

Tape::Var Tape::left_multiply(const Matrix& K, Var a) {
  check(a);
  const std::size_t ia = a.id;
  if (K.cols() != nodes_[ia].value.rows()) throw UsageError("Tape::left_multiply: shape mismatch");
  return push(K * nodes_[ia].value, needs(a),
              [ia, Kt = Matrix(K.transpose())](const Matrix& g, std::vector<Matrix>& grads) {
                accumulate(grads, ia, Kt * g);
              });
}

Tape::Var Tape::add(Var a, Var b) {
  check(a);
  check(b);
  const std::size_t ia = a.id, ib = b.id;
  if (nodes_[ia].value.rows() != nodes_[ib].value.rows() || nodes_[ia].value.cols() != nodes_[ib].value.cols()) {
    throw UsageError("Tape::add: shape mismatch");
  }
  return push(nodes_[ia].value + nodes_[ib].value, needs(a) || needs(b),
              [this, ia, ib](const Matrix& g, std::vector<Matrix>& grads) {
                if (nodes_[ia].needsGrad) accumulate(grads, ia, g);
                if (nodes_[ib].needsGrad) accumulate(grads, ib, g);
              });
}

Tape::Var Tape::sub(Var a, Var b) {
  check(a);
  check(b);
  const std::size_t ia = a.id, ib = b.id;
  if (nodes_[ia].value.rows() != nodes_[ib].value.rows() || nodes_[ia].value.cols() != nodes_[ib].value.cols()) {
    throw UsageError("Tape::sub: shape mismatch");
  }
  return push(nodes_[ia].value - nodes_[ib].value, needs(a) || needs(b),
              [this, ia, ib](const Matrix& g, std::vector<Matrix>& grads) {
                if (nodes_[ia].needsGrad) accumulate(grads, ia, g);
                if (nodes_[ib].needsGrad) accumulate(grads, ib, -g);
              });
}

Tape::Var Tape::add_bias(Var a, Var bias) {
  check(a);
  check(bias);
  const std::size_t ia = a.id, ib = bias.id;
  if (nodes_[ib].value.cols() != 1 || nodes_[ib].value.rows() != nodes_[ia].value.rows()) {
    throw UsageError("Tape::add_bias: bias must be a column matching the rows");
  }
  Matrix out = nodes_[ia].value.colwise() + nodes_[ib].value.col(0);
  return push(std::move(out), needs(a) || needs(bias),
              [this, ia, ib](const Matrix& g, std::vector<Matrix>& grads) {
                if (nodes_[ia].needsGrad) accumulate(grads, ia, g);
                if (nodes_[ib].needsGrad) accumulate(grads, ib, g.rowwise().sum());
              });
}

Tape::Var Tape::tanh(Var a) {
  check(a);
  const std::size_t ia = a.id;
  const std::size_t out = nodes_.size();
  return push(nodes_[ia].value.array().tanh().matrix(), needs(a),
              [this, ia, out](const Matrix& g, std::vector<Matrix>& grads) {
                const auto& y = nodes_[out].value.array();
                accumulate(grads, ia, (g.array() * (1.0 - y * y)).matrix());
              });
}

Tape::Var Tape::scale(Var a, double s) {
  check(a);
  const std::size_t ia = a.id;
  return push(nodes_[ia].value * s, needs(a),
              [ia, s](const Matrix& g, std::vector<Matrix>& grads) { accumulate(grads, ia, g * s); });
}

Tape::Var Tape::scale_columns(Var a, const RowVector& w) {
  check(a);
  const std::size_t ia = a.id;
  if (w.size() != nodes_[ia].value.cols()) throw UsageError("Tape::scale_columns: shape mismatch");
  Matrix out = nodes_[ia].value.array().rowwise() * w.array();
  return push(std::move(out), needs(a), [ia, w](const Matrix& g, std::vector<Matrix>& grads) {
    accumulate(grads, ia, (g.array().rowwise() * w.array()).matrix());
  });
}

Tape::Var Tape::sum_squares(Var a, double weight) {
  check(a);
  const std::size_t ia = a.id;
  Matrix out(1, 1);
  out(0, 0) = weight * nodes_[ia].value.squaredNorm();
  return push(std::move(out), needs(a), [this, ia, weight](const Matrix& g, std::vector<Matrix>& grads) {
    accumulate(grads, ia, (2.0 * weight * g(0, 0)) * nodes_[ia].value);
  });
}

Vector Tape::grad(Var loss) const {
  check(loss);
  if (nodes_[loss.id].value.size() != 1) throw UsageError("Tape::grad: loss must be a scalar");
  std::vector<Matrix> grads(loss.id + 1);
  grads[loss.id] = Matrix::Ones(1, 1);
  for (std::size_t k = loss.id + 1; k-- > 0;) {
    const Node& node = nodes_[k];
    if (!node.needsGrad || grads[k].size() == 0) continue;
    node.back(grads[k], grads);
  }
  Eigen::Index total = 0;
  for (std::size_t id : params_) total += nodes_[id].value.size();
  Vector out = Vector::Zero(total);
  Eigen::Index off = 0;
  for (std::size_t id : params_) {
    const Eigen::Index sz = nodes_[id].value.size();
    if (id < grads.size() && grads[id].size() != 0) out.segment(off, sz) = grads[id].reshaped();
    off += sz;
  }
  return out;
}

}  // namespace ppgm::nn
