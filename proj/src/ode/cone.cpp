#include "ppgm/ode/cone.h"

#include <algorithm>
#include <string>

#include "ppgm/core/errors.h"
#include "ppgm/ode/nonneg_qp.h"

namespace ppgm::ode {

double ConeReference::value(std::size_t node, double x) const {
  const double pos = std::max(0.0, x);
  const double neg = std::max(0.0, -x);
  return Pplus.at(node) * pos * pos + Pminus.at(node) * neg * neg;
}

Vector ConeReference::control(std::size_t node, double x) const {
  return xiPlus.at(node) * std::max(0.0, x) + xiMinus.at(node) * std::max(0.0, -x);
}

ConeQp cone_qp(const LQSpec& spec, double t, double P, double sign) {
  const auto& d = spec.dyn;
  const Matrix& B = d.B.at(t);
  const Matrix& C = d.C.at(t);
  const Matrix& D = d.D.at(t);
  ConeQp qp;
  qp.M = 0.5 * spec.R.at(t) + P * D.transpose() * D;
  qp.q = sign * (P * B.transpose() + P * C(0, 0) * D.transpose() + 0.5 * spec.S.at(t)).col(0);
  return qp;
}

ConeReference solve_cone_reference(const LQSpec& spec, const TimeGrid& grid, std::size_t substeps) {
  spec.validate();
  if (spec.dyn.n != 1) throw SpecError("solve_cone_reference: requires a scalar state (n = 1)");
  if (!spec.dyn.constraint.is_positive_cone()) {
    throw SpecError("solve_cone_reference: requires the positive-cone constraint");
  }
  if (grid.horizon() != spec.dyn.T) throw SpecError("solve_cone_reference: grid horizon differs");

  auto inner = [&](double t_left, std::size_t node, double P, double sign) {
    const ConeQp qp = cone_qp(spec, t_left, P, sign);
    try {
      return nonneg_qp_min(qp.M, qp.q);
    } catch (const SpecError&) {
      throw NumericError("solve_cone_reference: R/2 + D'PD not positive definite near node " +
                         std::to_string(node));
    }
  };

  // State column: (P+, P-).
  auto rhs = [&](double, std::size_t i, const Matrix& state) -> Matrix {
    const double t = grid.t(i);
    const auto& d = spec.dyn;
    const double a = 2.0 * d.A.at(t)(0, 0) + d.C.at(t)(0, 0) * d.C.at(t)(0, 0);
    const double halfq = 0.5 * spec.Q.at(t)(0, 0);
    Matrix out(2, 1);
    out(0, 0) = -(a * state(0, 0) + halfq + inner(t, i, state(0, 0), +1.0).minValue);
    out(1, 0) = -(a * state(1, 0) + halfq + inner(t, i, state(1, 0), -1.0).minValue);
    return out;
  };
  Matrix terminal(2, 1);
  terminal << 0.5 * spec.G(0, 0), 0.5 * spec.G(0, 0);
  const auto sol = rk4_backward(rhs, terminal, grid, substeps);

  ConeReference ref{grid, {}, {}, {}, {}};
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    const double pp = sol.values[i](0, 0);
    const double pm = sol.values[i](1, 0);
    ref.Pplus.push_back(pp);
    ref.Pminus.push_back(pm);
    ref.xiPlus.push_back(inner(grid.t(i), i, pp, +1.0).xi);
    ref.xiMinus.push_back(inner(grid.t(i), i, pm, -1.0).xi);
  }
  return ref;
}

}  // namespace ppgm::ode
