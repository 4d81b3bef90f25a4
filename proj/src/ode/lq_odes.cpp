#include "ppgm/ode/lq_odes.h"

#include <cmath>
#include <string>

#include "ppgm/core/errors.h"

namespace ppgm::ode {

namespace {

struct IntervalData {
  Matrix A, At, B, C, Ct, D, Q, R, S;
};

std::vector<IntervalData> sample_intervals(const LQSpec& spec, const TimeGrid& grid) {
  std::vector<IntervalData> out;
  out.reserve(grid.nodes());
  const auto& d = spec.dyn;
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    const double t = grid.t(i);
    IntervalData c{d.A.at(t), d.A.at(t).transpose(), d.B.at(t), d.C.at(t), d.C.at(t).transpose(),
                   d.D.at(t), spec.Q.at(t), spec.R.at(t), spec.S.at(t)};
    out.push_back(std::move(c));
  }
  return out;
}

void check_alpha(const LQSpec& spec, const CoefficientPath& alpha) {
  spec.validate();
  if (alpha.rows() != spec.dyn.m || alpha.cols() != spec.dyn.n) {
    throw SpecError("alpha: expected m x n feedback path");
  }
  if (alpha.grid().horizon() != spec.dyn.T) throw SpecError("alpha: horizon differs from problem");
}

// Right-hand side of the cost Lyapunov equation for a fixed feedback.
Matrix lyapunov_rhs(const IntervalData& c, const Matrix& alpha, const Matrix& P) {
  const Matrix F = c.A + c.B * alpha;
  const Matrix K = c.C + c.D * alpha;
  const Matrix cross = c.S.transpose() * alpha;
  return -(P * F + F.transpose() * P + K.transpose() * P * K + c.Q + cross + cross.transpose() +
           alpha.transpose() * c.R * alpha);
}

}  // namespace

MatrixOdeSolution solve_a_ode(const LQSpec& spec, const CoefficientPath& alpha, std::size_t substeps) {
  check_alpha(spec, alpha);
  const TimeGrid& grid = alpha.grid();
  const auto data = sample_intervals(spec, grid);

  struct Frozen {
    Matrix F, K, At, Ct, forcing;
  };
  std::vector<Frozen> frozen;
  frozen.reserve(grid.steps());
  for (std::size_t i = 0; i < grid.steps(); ++i) {
    const auto& c = data[i];
    const Matrix& al = alpha.node(i);
    frozen.push_back({c.A + c.B * al, c.C + c.D * al, c.At, c.Ct, c.Q + c.S.transpose() * al});
  }
  auto rhs = [&](double, std::size_t i, const Matrix& a) -> Matrix {
    const Frozen& f = frozen[i];
    return -(a * f.F + f.At * a + f.Ct * (a * f.K) + f.forcing);
  };
  return rk4_backward(rhs, spec.G, grid, substeps);
}

MatrixOdeSolution solve_cost_lyapunov(const LQSpec& spec, const CoefficientPath& alpha,
                                      std::size_t substeps) {
  check_alpha(spec, alpha);
  const TimeGrid& grid = alpha.grid();
  const auto data = sample_intervals(spec, grid);
  auto rhs = [&](double, std::size_t i, const Matrix& P) -> Matrix {
    return lyapunov_rhs(data[i], alpha.node(i), P);
  };
  return rk4_backward(rhs, spec.G, grid, substeps);
}

Matrix feedback_of(const Matrix& a, const Matrix& B, const Matrix& C, const Matrix& D,
                   const Matrix& R, const Matrix& S) {
  const Matrix H = R + D.transpose() * a * D;
  Eigen::PartialPivLU<Matrix> lu(H);
  const double rc = lu.rcond();
  if (!(rc > 1e-13)) {
    throw NumericError("feedback_of: R + D'aD is singular (rcond " + std::to_string(rc) + ")");
  }
  return -lu.solve(B.transpose() * a + D.transpose() * a * C + S);
}

RiccatiSolution solve_riccati(const LQSpec& spec, const TimeGrid& grid, RiccatiScheme scheme,
                              std::size_t substeps) {
  spec.validate();
  if (grid.horizon() != spec.dyn.T) throw SpecError("solve_riccati: grid horizon differs from problem");
  const auto data = sample_intervals(spec, grid);
  const Eigen::Index n = spec.dyn.n;

  auto alpha_at = [&](const IntervalData& c, const Matrix& a, std::size_t node) -> Matrix {
    try {
      return feedback_of(a, c.B, c.C, c.D, c.R, c.S);
    } catch (const NumericError&) {
      throw NumericError("solve_riccati: R + D'aD singular near node " + std::to_string(node));
    }
  };

  if (scheme == RiccatiScheme::Continuous) {
    // Integrate a and the optimal cost matrix P jointly, stacked as [a; P].
    auto rhs = [&](double, std::size_t i, const Matrix& stacked) -> Matrix {
      const IntervalData& c = data[i];
      const Matrix a = stacked.topRows(n);
      const Matrix P = stacked.bottomRows(n);
      const Matrix al = alpha_at(c, a, i);
      Matrix out(2 * n, n);
      out.topRows(n) = -(a * c.A + c.At * a + c.Ct * a * c.C + c.Q +
                         (a * c.B + c.Ct * a * c.D + c.S.transpose()) * al);
      out.bottomRows(n) = lyapunov_rhs(c, al, P);
      return out;
    };
    Matrix terminal(2 * n, n);
    terminal << spec.G, spec.G;
    const auto joint = rk4_backward(rhs, terminal, grid, substeps);

    RiccatiSolution sol{{grid, {}}, CoefficientPath(), {grid, {}}};
    std::vector<Matrix> alphas;
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
      const Matrix& st = joint.values[i];
      sol.aStar.values.push_back(st.topRows(n));
      sol.valueCoeff.values.push_back(st.bottomRows(n));
      alphas.push_back(alpha_at(data[i], sol.aStar.values.back(), i));
    }
    sol.alphaStar = CoefficientPath(grid, std::move(alphas));
    return sol;
  }

  // Piecewise-constant policy: on each interval solve the implicit relation
  // alpha_i = alpha(a_i), a_i = flow of the linear a-ODE from a_{i+1} under
  // alpha_i, by fixed-point iteration (contraction factor O(dt)).
  std::vector<Matrix> a_nodes(grid.nodes());
  std::vector<Matrix> alphas(grid.nodes());
  a_nodes[grid.steps()] = spec.G;
  alphas[grid.steps()] = alpha_at(data[grid.steps()], spec.G, grid.steps());
  const double h = grid.dt() / static_cast<double>(substeps);
  for (std::size_t i = grid.steps(); i-- > 0;) {
    const IntervalData& c = data[i];
    Matrix al = alpha_at(c, a_nodes[i + 1], i);
    Matrix a_left;
    for (int iter = 0; iter < 200; ++iter) {
      const Matrix F = c.A + c.B * al;
      const Matrix K = c.C + c.D * al;
      const Matrix forcing = c.Q + c.S.transpose() * al;
      auto f = [&](const Matrix& a) -> Matrix { return -(a * F + c.At * a + c.Ct * (a * K) + forcing); };
      Matrix a = a_nodes[i + 1];
      for (std::size_t s = 0; s < substeps; ++s) {
        const Matrix k1 = f(a);
        const Matrix k2 = f(a - 0.5 * h * k1);
        const Matrix k3 = f(a - 0.5 * h * k2);
        const Matrix k4 = f(a - h * k3);
        a -= (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      a_left = a;
      Matrix next = alpha_at(c, a_left, i);
      const double change = (next - al).cwiseAbs().maxCoeff();
      al = std::move(next);
      if (change <= 1e-15 * std::max(1.0, al.cwiseAbs().maxCoeff())) break;
    }
    if (!a_left.allFinite()) {
      throw NumericError("solve_riccati: non-finite value at node " + std::to_string(i));
    }
    alphas[i] = al;
    a_nodes[i] = a_left;
  }
  // a* is recomputed from the converged policy so it matches solve_a_ode
  // bit for bit.
  CoefficientPath alpha_path(grid, alphas);
  RiccatiSolution sol{solve_a_ode(spec, alpha_path, substeps), alpha_path,
                      solve_cost_lyapunov(spec, alpha_path, substeps)};
  return sol;
}

}  // namespace ppgm::ode
