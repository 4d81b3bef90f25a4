#include "ppgm/ode/rk4.h"

#include <string>

#include "ppgm/core/errors.h"

namespace ppgm::ode {

MatrixOdeSolution rk4_backward(const MatrixRhs& rhs, const Matrix& terminal, const TimeGrid& grid,
                               std::size_t substeps) {
  if (substeps == 0) throw UsageError("rk4_backward: substeps must be positive");
  if (!terminal.allFinite()) throw NumericError("rk4_backward: non-finite terminal value");

  MatrixOdeSolution sol{grid, std::vector<Matrix>(grid.nodes())};
  sol.values[grid.steps()] = terminal;
  Matrix m = terminal;
  const double h = -grid.dt() / static_cast<double>(substeps);

  for (std::size_t i = grid.steps(); i-- > 0;) {
    const double t_right = grid.t(i + 1);
    for (std::size_t s = 0; s < substeps; ++s) {
      const double t = t_right + static_cast<double>(s) * h;
      const Matrix k1 = rhs(t, i, m);
      const Matrix k2 = rhs(t + 0.5 * h, i, m + 0.5 * h * k1);
      const Matrix k3 = rhs(t + 0.5 * h, i, m + 0.5 * h * k2);
      const Matrix k4 = rhs(t + h, i, m + h * k3);
      m += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!m.allFinite()) {
      throw NumericError("rk4_backward: non-finite value at node " + std::to_string(i) +
                         " (t=" + std::to_string(grid.t(i)) + ")");
    }
    sol.values[i] = m;
  }
  return sol;
}

}  // namespace ppgm::ode
