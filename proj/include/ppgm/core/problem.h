#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ppgm/core/coefficient_path.h"
#include "ppgm/core/constraint.h"

namespace ppgm {

/// Linear controlled dynamics dX = (A X + B u) dt + (C X + D u) dW on [0, T].
struct Dynamics {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  CoefficientPath A;
  CoefficientPath B;
  CoefficientPath C;
  CoefficientPath D;
  double T = 1.0;
  Vector x0;
  ConstraintSet constraint;

  /// Throws SpecError on inconsistent dimensions.
  void validate() const;
};

/// Linear-quadratic problem with
///   f_t(x, u) = x'Q_t x / 2 + x'S_t'u + u'R_t u / 2,   g(x) = x'G x / 2.
struct LQSpec {
  Dynamics dyn;
  CoefficientPath Q;
  CoefficientPath R;
  CoefficientPath S;
  Matrix G;

  /// Checks dimensions and finiteness, then replaces Q, R, G by their
  /// symmetric parts. Returns one warning per matrix whose asymmetry
  /// exceeded 1e-9.
  std::vector<std::string> normalize();

  /// Throws SpecError on inconsistent dimensions or asymmetry above 1e-12.
  void validate() const;
};

/// Running and terminal cost evaluators. All callables must be safe to call
/// concurrently.
struct CostModel {
  std::function<double(double t, const Vector& x, const Vector& u)> running;
  std::function<Vector(double t, const Vector& x, const Vector& u)> running_grad_x;
  std::function<Vector(double t, const Vector& x, const Vector& u)> running_grad_u;
  std::function<double(const Vector& x)> terminal;
  std::function<Vector(const Vector& x)> terminal_grad;
};

/// Linear dynamics with an arbitrary differentiable cost.
struct GeneralProblem {
  Dynamics dyn;
  CostModel cost;
  std::string name;
};

GeneralProblem to_general(const LQSpec& spec, std::string name = "lq");

}  // namespace ppgm
