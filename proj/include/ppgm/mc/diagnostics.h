#pragma once

#include "ppgm/mc/paths.h"
#include "ppgm/mc/stats.h"

namespace ppgm::mc {

/// Adjoint pair (Y_t, Z_t) as a function of the current state.
struct AdjointValue {
  Vector y;
  Vector z;
};
using AdjointEvaluator = std::function<AdjointValue(std::size_t node, double t, const Vector& x)>;

/// Exact adjoint of an unconstrained LQ problem under u = alpha x:
/// Y = a X and Z = a (C + D alpha) X, with a from the linear a-ODE.
AdjointEvaluator lq_adjoint(const LQSpec& spec, const CoefficientPath& alpha);

/// Random-probe estimate of the ratio E|X_T|^2 / ||u||^2_H2 for
/// zero-start paths driven by open-loop controls u.
struct CoercivityEstimate {
  double lambdaMin = 0.0;
  double opNormSq = 0.0;
  /// Standard errors of the probes attaining the min and the max.
  double lambdaMinStdErr = 0.0;
  double opNormSqStdErr = 0.0;
  std::size_t probes = 0;
  std::size_t skipped = 0;
  std::vector<double> ratios;
};

/// Probes are piecewise constant with i.i.d. standard normal node values and
/// share one set of Brownian increments. Random probing only bounds the true
/// infimum from above. Requires probes >= 10.
CoercivityEstimate estimate_coercivity(const Dynamics& dyn, std::size_t probes, std::size_t M,
                                       const TimeGrid& grid, std::uint64_t seed);

/// Duality residual E[X'_T' G X_T] - E int [u'(B'Y + D'Z) - X'_t' xi_t] dt for
/// the feedback u = alpha x, where X' solves the state equation from zero
/// under the same u and noise, and xi = Q X + S'u. The adjoint is the Euler
/// counterpart of Y = a X, Z = a (C + D alpha) X:
///   Y_i = a_{i+1} (I + F_i dt) X_i,  Z_i = a_{i+1} K_i X_i,
///   a_i = (I + A_i dt)' a_{i+1} (I + F_i dt) + C_i' a_{i+1} K_i dt + (Q_i + S_i' alpha_i) dt,
/// with F = A + B alpha and K = C + D alpha. It tends to the a-ODE solution
/// as dt -> 0 and makes the identity exact for the simulated scheme, so the
/// residual is pure Monte Carlo error. Requires a Free constraint.
EstimateWithError check_duality(const LQSpec& spec, const CoefficientPath& alpha, std::size_t M,
                                const TimeGrid& grid, std::uint64_t seed);

/// H2 norm of u - prox(u - tau dH/du(X, u, Y, Z)) along simulated paths.
/// `mean` is the norm (square root of the mean squared residual); `stdErr`
/// follows from the delta method.
EstimateWithError stationarity_residual(const GeneralProblem& prob, const Policy& policy,
                                        const AdjointEvaluator& adjoint, double tau, std::size_t M,
                                        const TimeGrid& grid, std::uint64_t seed, const StartSpec& start);
EstimateWithError stationarity_residual(const GeneralProblem& prob, const Policy& policy,
                                        const AdjointEvaluator& adjoint, double tau, std::size_t M,
                                        const TimeGrid& grid, std::uint64_t seed);

}  // namespace ppgm::mc
