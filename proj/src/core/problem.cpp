#include "ppgm/core/problem.h"

#include <string>

#include "ppgm/core/errors.h"

namespace ppgm {

namespace {

void expect_shape(const CoefficientPath& p, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (p.rows() != rows || p.cols() != cols) {
    throw SpecError(std::string(name) + ": expected " + std::to_string(rows) + "x" +
                    std::to_string(cols) + ", got " + std::to_string(p.rows()) + "x" +
                    std::to_string(p.cols()));
  }
}

void expect_horizon(const CoefficientPath& p, double T, const char* name) {
  if (p.grid().horizon() != T) {
    throw SpecError(std::string(name) + ": path horizon differs from problem horizon");
  }
}

double asymmetry(const Matrix& m) { return m.size() == 0 ? 0.0 : (m - m.transpose()).cwiseAbs().maxCoeff(); }

}  // namespace

void Dynamics::validate() const {
  if (n < 1 || m < 1) throw SpecError("Dynamics: n and m must be positive");
  expect_shape(A, n, n, "A");
  expect_shape(B, n, m, "B");
  expect_shape(C, n, n, "C");
  expect_shape(D, n, m, "D");
  expect_horizon(A, T, "A");
  expect_horizon(B, T, "B");
  expect_horizon(C, T, "C");
  expect_horizon(D, T, "D");
  if (x0.size() != n) throw SpecError("x0: expected length " + std::to_string(n));
  if (!x0.allFinite()) throw SpecError("x0: non-finite entry");
  if (constraint.is_box() && constraint.as_box().lo.size() != m) {
    throw SpecError("constraint: box dimension differs from m");
  }
}

void LQSpec::validate() const {
  dyn.validate();
  expect_shape(Q, dyn.n, dyn.n, "Q");
  expect_shape(R, dyn.m, dyn.m, "R");
  expect_shape(S, dyn.m, dyn.n, "S");
  expect_horizon(Q, dyn.T, "Q");
  expect_horizon(R, dyn.T, "R");
  expect_horizon(S, dyn.T, "S");
  if (G.rows() != dyn.n || G.cols() != dyn.n) throw SpecError("G: expected n x n");
  if (!G.allFinite()) throw SpecError("G: non-finite entry");
  for (std::size_t i = 0; i < Q.grid().nodes(); ++i) {
    if (asymmetry(Q.node(i)) > 1e-12) throw SpecError("Q: not symmetric at node " + std::to_string(i));
  }
  for (std::size_t i = 0; i < R.grid().nodes(); ++i) {
    if (asymmetry(R.node(i)) > 1e-12) throw SpecError("R: not symmetric at node " + std::to_string(i));
  }
  if (asymmetry(G) > 1e-12) throw SpecError("G: not symmetric");
}

std::vector<std::string> LQSpec::normalize() {
  dyn.validate();
  expect_shape(Q, dyn.n, dyn.n, "Q");
  expect_shape(R, dyn.m, dyn.m, "R");
  expect_shape(S, dyn.m, dyn.n, "S");
  if (G.rows() != dyn.n || G.cols() != dyn.n) throw SpecError("G: expected n x n");

  std::vector<std::string> warnings;
  auto symmetrize_path = [&](CoefficientPath& p, const char* name) {
    double worst = 0.0;
    for (std::size_t i = 0; i < p.grid().nodes(); ++i) {
      Matrix& v = p.node(i);
      worst = std::max(worst, asymmetry(v));
      v = (0.5 * (v + v.transpose())).eval();
    }
    if (worst > 1e-9) {
      warnings.push_back(std::string(name) + " asymmetric by " + std::to_string(worst) +
                         "; replaced by its symmetric part");
    }
  };
  symmetrize_path(Q, "Q");
  symmetrize_path(R, "R");
  if (asymmetry(G) > 1e-9) {
    warnings.push_back("G asymmetric by " + std::to_string(asymmetry(G)) +
                       "; replaced by its symmetric part");
  }
  G = (0.5 * (G + G.transpose())).eval();
  validate();
  return warnings;
}

GeneralProblem to_general(const LQSpec& spec, std::string name) {
  spec.validate();
  // The evaluators capture the cost paths by value so the problem stays
  // valid independently of `spec`.
  auto Q = spec.Q;
  auto R = spec.R;
  auto S = spec.S;
  Matrix G = spec.G;
  CostModel cost;
  cost.running = [Q, R, S](double t, const Vector& x, const Vector& u) {
    return 0.5 * x.dot(Q.at(t) * x) + u.dot(S.at(t) * x) + 0.5 * u.dot(R.at(t) * u);
  };
  cost.running_grad_x = [Q, S](double t, const Vector& x, const Vector& u) -> Vector {
    return Q.at(t) * x + S.at(t).transpose() * u;
  };
  cost.running_grad_u = [R, S](double t, const Vector& x, const Vector& u) -> Vector {
    return S.at(t) * x + R.at(t) * u;
  };
  cost.terminal = [G](const Vector& x) { return 0.5 * x.dot(G * x); };
  cost.terminal_grad = [G](const Vector& x) -> Vector { return G * x; };
  return GeneralProblem{spec.dyn, std::move(cost), std::move(name)};
}

}  // namespace ppgm
