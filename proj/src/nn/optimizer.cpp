#include "ppgm/nn/optimizer.h"

#include <cmath>
#include <string>

#include "ppgm/core/errors.h"

namespace ppgm::nn {

const char* to_string(OptimizerKind kind) { return kind == OptimizerKind::Adam ? "adam" : "plain"; }

OptimizerKind optimizer_kind_from_string(const std::string& name) {
  if (name == "plain" || name == "gd") return OptimizerKind::Plain;
  if (name == "adam") return OptimizerKind::Adam;
  throw SpecError("unknown optimizer '" + name + "' (expected plain or adam)");
}

OptimizerState make_optimizer(OptimizerKind kind, double lr) {
  if (!(lr > 0.0)) throw SpecError("optimizer learning rate must be positive");
  OptimizerState s;
  s.kind = kind;
  s.lr = lr;
  return s;
}

Vector optimizer_step(OptimizerState& state, const Vector& params, const Vector& grads) {
  if (params.size() != grads.size()) throw UsageError("optimizer_step: parameter and gradient sizes differ");
  if (state.kind == OptimizerKind::Plain) return params - state.lr * grads;

  if (state.m.size() == 0) {
    state.m = Vector::Zero(params.size());
    state.v = Vector::Zero(params.size());
  }
  if (state.m.size() != params.size()) throw UsageError("optimizer_step: moment buffers have the wrong size");
  ++state.steps;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.steps));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.steps));
  const Vector mh = state.m / c1;
  const Vector vh = state.v / c2;
  return params - (state.lr * mh.array() / (vh.array().sqrt() + state.eps)).matrix();
}

}  // namespace ppgm::nn
