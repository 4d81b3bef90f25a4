#pragma once

#include <vector>

#include "ppgm/core/problem.h"
#include "ppgm/ode/rk4.h"

namespace ppgm::ode {

/// Reference solution of a scalar-state LQ problem with controls in the
/// nonnegative orthant. The value is v_t(x) = P+_t max(0,x)^2 + P-_t max(0,-x)^2
/// and the optimal control u_t(x) = xi+_t max(0,x) + xi-_t max(0,-x).
struct ConeReference {
  TimeGrid grid;
  std::vector<double> Pplus;
  std::vector<double> Pminus;
  std::vector<Vector> xiPlus;
  std::vector<Vector> xiMinus;

  double value(std::size_t node, double x) const;
  Vector control(std::size_t node, double x) const;
};

/// Quadratic data of the per-sign pointwise minimization at time t:
///   min over xi >= 0 of xi'(R/2 + D'PD) xi + 2 sign xi'(B'P + D'PC + S/2).
struct ConeQp {
  Matrix M;
  Vector q;
};
ConeQp cone_qp(const LQSpec& spec, double t, double P, double sign);

/// Integrates
///   dP/dt = -((2A + C^2) P + Q/2 + min_{xi >= 0} H(t, xi, P)),  P_T = G/2,
/// separately for each sign, solving the inner problem exactly with
/// nonneg_qp_min at every RK4 stage. Requires n = 1 and a PositiveCone
/// constraint. Throws NumericError naming the node if R/2 + D'PD loses
/// positive definiteness.
ConeReference solve_cone_reference(const LQSpec& spec, const TimeGrid& grid,
                                   std::size_t substeps = kRefinement);

}  // namespace ppgm::ode
