#pragma once

#include <cstdint>
#include <optional>

#include "ppgm/core/history.h"
#include "ppgm/core/problem.h"
#include "ppgm/ode/lq_odes.h"

namespace ppgm::lq {

/// One policy-gradient update of a linear feedback alpha:
///   a = solve_a_ode(spec, alpha),
///   alpha'_t = alpha_t - tau (B'a + D'a(C + D alpha) + R alpha + S)  at every node.
/// Requires an unconstrained problem and tau > 0.
CoefficientPath lq_pgm_step(const LQSpec& spec, const CoefficientPath& alpha, double tau);

/// Same update given a precomputed a-path on alpha's grid.
CoefficientPath lq_pgm_update(const LQSpec& spec, const CoefficientPath& alpha,
                              const ode::MatrixOdeSolution& a, double tau);

/// Feedback with entries drawn i.i.d. from Unif[-0.1, 0.1] at every node.
CoefficientPath random_initial_alpha(const LQSpec& spec, const TimeGrid& grid, std::uint64_t seed);

struct LqPgmOptions {
  double tau = 0.1;
  double tol = 1e-6;
  std::size_t kmax = 200;
  /// Control grid used when no initial alpha is supplied.
  std::size_t timeSteps = 100;
  std::uint64_t seed = 0;
  /// Iterates with sup-norm above this raise DivergenceError.
  double divergenceBound = 1e8;
  /// Fill wallMillis with elapsed time; zero otherwise so histories are reproducible.
  bool recordTiming = false;
};

struct LqPgmResult {
  CoefficientPath alpha;
  ode::MatrixOdeSolution a;
  IterateHistory history;
  bool converged = false;
};

/// Iterates lq_pgm_step until
///   Delta_k = |alpha^k - alpha^{k-1}|_inf / |alpha^{k-1}|_inf < tol
/// or k = kmax. Without alpha0, starts from random_initial_alpha on a
/// timeSteps grid. With a reference, records control and value errors
/// relative to it. Throws DivergenceError if the iterates blow up.
LqPgmResult run_lq_pgm(const LQSpec& spec, std::optional<CoefficientPath> alpha0,
                       const LqPgmOptions& opts,
                       const ode::RiccatiSolution* reference = nullptr);

}  // namespace ppgm::lq
