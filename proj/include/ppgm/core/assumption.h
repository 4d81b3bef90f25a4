#pragma once

#include <string_view>
#include <vector>

#include "ppgm/core/problem.h"

namespace ppgm {

enum class CaseKind { Standard, SingularI, SingularII, NotSatisfied };

std::string_view to_string(CaseKind k);

/// Diffusion coercivity matrices at one time:
///   AA = A + A' + C'C,  BB = B + C'D,  DD = D'D.
struct CoercivityMatrices {
  Matrix AA;
  Matrix BB;
  Matrix DD;
};

CoercivityMatrices coercivity_matrices(const Dynamics& dyn, double t);

/// Smallest eigenvalue of the symmetric part of `m`.
double min_eigenvalue(const Matrix& m);

struct AssumptionReport {
  CaseKind caseKind = CaseKind::NotSatisfied;
  double mu = 0.0;
  /// Coercivity constant; 0 outside the singular cases.
  double delta = 0.0;
  /// BB vanishes at every node, so singular case (ii) needs no small-T condition.
  bool couplingVanishes = false;
  std::vector<double> times;
  std::vector<Matrix> Amat;
  std::vector<Matrix> Bmat;
  std::vector<Matrix> Dmat;
  /// Per-node minimum eigenvalue behind the verdict: lambda_min(R_t) in the
  /// standard case, of DD - BB' AA^-1 BB in case (i), of DD - BB'BB in case (ii).
  std::vector<double> minEigens;
};

/// Classifies an LQ problem into the standard or singular convexity regime.
///
/// Standard when min_t lambda_min(R_t) > 0 (that minimum is mu). Otherwise
/// singular when lambda_min(G) = mu > 0 and either AA_t is positive definite
/// at every node with DD - BB' AA^-1 BB >= delta I (case i), or AA_t is
/// positive semi-definite with DD - BB'BB >= delta I (case ii). Nodes are
/// those of the finest coefficient grid.
AssumptionReport assumption_check(const LQSpec& spec);

/// Singular-case test for a problem whose terminal cost is mu-strongly convex
/// with a known mu (used for non-quadratic costs).
AssumptionReport singular_check(const Dynamics& dyn, double terminal_mu);

}  // namespace ppgm
