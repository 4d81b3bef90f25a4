#pragma once

#include "ppgm/core/coefficient_path.h"

namespace ppgm::ode {

struct NonnegQpResult {
  Vector xi;
  double minValue = 0.0;
};

/// Largest problem size accepted by nonneg_qp_min (2^20 active sets).
inline constexpr Eigen::Index kMaxQpDimension = 20;

/// Exact minimizer of xi'M xi + 2 xi'q over xi >= 0 for positive definite M.
///
/// Enumerates every support set F, solves M_FF xi_F = -q_F and keeps the
/// cheapest candidate with xi_F >= 0. For positive definite M that candidate
/// is the unique KKT point. Throws SpecError if M is not positive definite or
/// larger than kMaxQpDimension.
NonnegQpResult nonneg_qp_min(const Matrix& M, const Vector& q);

}  // namespace ppgm::ode
