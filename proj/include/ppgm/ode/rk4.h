#pragma once

#include <functional>
#include <vector>

#include "ppgm/core/coefficient_path.h"

namespace ppgm::ode {

/// Internal RK4 refinement per control interval used by the LQ solvers.
inline constexpr std::size_t kRefinement = 10;

/// Matrix ODE solution sampled at the nodes of `grid`.
struct MatrixOdeSolution {
  TimeGrid grid;
  std::vector<Matrix> values;

  const Matrix& at_node(std::size_t i) const { return values.at(i); }
  CoefficientPath as_path() const { return CoefficientPath(grid, values); }
};

/// Right-hand side dM/dt = F(t, interval, M). `interval` is the index of the
/// grid interval [t_i, t_{i+1}] currently being integrated, so piecewise
/// constant data can be looked up without ambiguity at the endpoints.
using MatrixRhs = std::function<Matrix(double t, std::size_t interval, const Matrix& m)>;

/// Classical fourth-order Runge-Kutta, integrated backward from t_N = T to 0.
///
/// Each grid interval is split into `substeps` equal RK4 steps. The terminal
/// node is exactly `terminal`. Throws NumericError naming the node if a
/// non-finite value appears.
MatrixOdeSolution rk4_backward(const MatrixRhs& rhs, const Matrix& terminal, const TimeGrid& grid,
                               std::size_t substeps = 1);

}  // namespace ppgm::ode
