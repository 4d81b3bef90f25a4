#pragma once

#include <string>

#include "ppgm/nn/tape.h"

namespace ppgm::nn {

enum class OptimizerKind { Plain, Adam };

const char* to_string(OptimizerKind kind);
/// Accepts "plain"/"gd" and "adam"; throws SpecError otherwise.
OptimizerKind optimizer_kind_from_string(const std::string& name);

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::Plain;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Moment buffers, sized on the first adaptive step.
  Vector m;
  Vector v;
  long steps = 0;
};

OptimizerState make_optimizer(OptimizerKind kind, double lr);

/// Plain: p - lr g. Adam: bias-corrected moment estimates.
/// Throws UsageError on shape mismatch.
Vector optimizer_step(OptimizerState& state, const Vector& params, const Vector& grads);

}  // namespace ppgm::nn
