#pragma once

#include "ppgm/core/problem.h"
#include "ppgm/ode/rk4.h"

namespace ppgm::ode {

/// Solves the linear a-ODE of a linear feedback u = alpha_t x,
///   a' + a(A + B alpha) + A'a + C'a(C + D alpha) + Q + S'alpha = 0,  a_T = G,
/// on alpha's grid. alpha and the problem coefficients are held constant on
/// each grid interval (read at its left node); each interval is integrated
/// with `substeps` RK4 steps.
MatrixOdeSolution solve_a_ode(const LQSpec& spec, const CoefficientPath& alpha,
                              std::size_t substeps = kRefinement);

/// Cost matrix P of a linear feedback: J = x0'P_0 x0 / 2, where
///   P' + P F + F'P + K'P K + Q + S'alpha + alpha'S + alpha'R alpha = 0,  P_T = G,
/// with F = A + B alpha and K = C + D alpha. Same discretization as solve_a_ode.
MatrixOdeSolution solve_cost_lyapunov(const LQSpec& spec, const CoefficientPath& alpha,
                                      std::size_t substeps = kRefinement);

/// Optimal feedback for a given value coefficient:
///   alpha(a) = -(R + D'aD)^-1 (B'a + D'aC + S).
/// Throws NumericError if R + D'aD is numerically singular.
Matrix feedback_of(const Matrix& a, const Matrix& B, const Matrix& C, const Matrix& D,
                   const Matrix& R, const Matrix& S);

enum class RiccatiScheme {
  /// alpha(a) re-evaluated at every RK4 stage: a fourth-order approximation
  /// of the exact Riccati flow.
  Continuous,
  /// alpha held constant on each control interval and equal to alpha(a) at
  /// the interval's left node: the exact fixed point of the discrete
  /// policy-gradient iteration on the same grid.
  PiecewiseConstantPolicy,
};

struct RiccatiSolution {
  MatrixOdeSolution aStar;
  CoefficientPath alphaStar;
  /// Cost matrix of the optimal feedback (J = x0'P_0 x0 / 2).
  MatrixOdeSolution valueCoeff;
};

/// Integrates
///   a' + aA + A'a + C'aC + Q + (aB + C'aD + S')alpha(a) = 0,  a_T = G,
/// backward on `grid`, with alpha(a) as in feedback_of. Throws NumericError
/// naming the node if R + D'aD becomes singular.
RiccatiSolution solve_riccati(const LQSpec& spec, const TimeGrid& grid,
                              RiccatiScheme scheme = RiccatiScheme::Continuous,
                              std::size_t substeps = kRefinement);

}  // namespace ppgm::ode
