#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ppgm/cli/builtins.h"
#include "ppgm/core/errors.h"
#include "ppgm/lq/lq_pgm.h"
#include "ppgm/ode/cone.h"
#include "ppgm/ode/lq_odes.h"
#include "ppgm/ode/nonneg_qp.h"
#include "ppgm/ode/rk4.h"
#include "support.h"

using namespace ppgm;
using namespace ppgm::ode;
using test::scalar;

namespace {

double sup_diff(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  REQUIRE(a.size() == b.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, (a[i] - b[i]).cwiseAbs().maxCoeff());
  return d;
}

double exp_error(std::size_t steps) {
  auto sol = rk4_backward([](double, std::size_t, const Matrix& m) -> Matrix { return -m; }, scalar(1),
                          TimeGrid(steps, 1.0));
  return std::abs(sol.at_node(0)(0, 0) - std::exp(1.0));
}

// Projected gradient descent with step 1/L, run until the iterate stalls.
Vector pgd_qp(const Matrix& M, const Vector& q) {
  const double L = 2.0 * Eigen::SelfAdjointEigenSolver<Matrix>(M).eigenvalues().maxCoeff();
  Vector x = Vector::Zero(q.size());
  for (int k = 0; k < 200000; ++k) {
    const Vector next = (x - (2.0 * (M * x + q)) / L).cwiseMax(0.0);
    const double step = (next - x).norm();
    x = next;
    if (step < 1e-14) break;
  }
  return x;
}

LQSpec trivial_cone_spec(double G) {
  auto s = test::scalar_spec({.A = 0.3, .Q = 0, .R = 1, .G = G});
  s.dyn.constraint = ConstraintSet::positive_cone();
  return s;
}

}  // namespace

TEST_CASE("zero right-hand side keeps the terminal value") {
  Matrix G(2, 2);
  G << 1, 2, 3, 4;
  auto sol = rk4_backward([](double, std::size_t, const Matrix& m) -> Matrix { return Matrix::Zero(m.rows(), m.cols()); },
                          G, TimeGrid(7, 2.0), 3);
  for (const auto& v : sol.values) CHECK(v == G);
}

TEST_CASE("exponential test problem") {
  CHECK(exp_error(100) <= 1e-6);
}

TEST_CASE("halving the step reduces the error about sixteen-fold") {
  const double ratio = exp_error(10) / exp_error(20);
  CHECK(ratio == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("non-finite values name the node") {
  auto rhs = [](double t, std::size_t, const Matrix& m) -> Matrix {
    return t < 0.5 ? Matrix::Constant(1, 1, NAN) : Matrix(-m);
  };
  CHECK_THROWS_AS(rk4_backward(rhs, scalar(1), TimeGrid(10, 1.0)), NumericError);
}

TEST_CASE("a-ODE of the zero feedback integrates the running cost") {
  auto s = test::scalar_spec({.Q = 2, .G = 1});
  auto zero = CoefficientPath::zeros(1, 1, TimeGrid(50, 1.0));
  CHECK(solve_a_ode(s, zero).at_node(0)(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("a-ODE without drift, diffusion or cost stays at the terminal value") {
  auto s = test::scalar_spec({.B = 0.7, .D = 0.2, .Q = 0, .G = 1.3});
  auto zero = CoefficientPath::zeros(1, 1, TimeGrid(20, 1.0));
  for (const auto& v : solve_a_ode(s, zero).values) CHECK(v(0, 0) == doctest::Approx(1.3).epsilon(1e-14));
}

TEST_CASE("a-ODE on std-lq matches a ten times finer independent integration") {
  auto s = cli::std_lq();
  const std::size_t N = 100;
  auto a = solve_a_ode(s, CoefficientPath::zeros(3, 2, TimeGrid(N, s.dyn.T)));
  CHECK(sup_diff(a.values, test::reference_a_zero_feedback(s, N, 100)) <= 1e-6);
}

TEST_CASE("a-ODE is linear in the cost data") {
  std::mt19937_64 rng(21);
  auto base = cli::std_lq();
  const TimeGrid grid(20, base.dyn.T);
  std::vector<Matrix> alphaNodes;
  for (std::size_t i = 0; i < grid.nodes(); ++i) alphaNodes.push_back(test::random_matrix(rng, 3, 2, 0.3));
  const CoefficientPath alpha(grid, alphaNodes);
  auto with = [&](const Matrix& Q, const Matrix& S, const Matrix& G) {
    auto s = base;
    s.Q = CoefficientPath::constant(Q, s.dyn.T);
    s.S = CoefficientPath::constant(S, s.dyn.T);
    s.G = G;
    return solve_a_ode(s, alpha).values;
  };
  auto sym = [&](Matrix m) -> Matrix { return 0.5 * (m + m.transpose()); };
  const Matrix Q1 = sym(test::random_matrix(rng, 2, 2)), Q2 = sym(test::random_matrix(rng, 2, 2));
  const Matrix S1 = test::random_matrix(rng, 3, 2), S2 = test::random_matrix(rng, 3, 2);
  const Matrix G1 = sym(test::random_matrix(rng, 2, 2)), G2 = sym(test::random_matrix(rng, 2, 2));
  auto a1 = with(Q1, S1, G1), a2 = with(Q2, S2, G2), a12 = with(Q1 + Q2, S1 + S2, G1 + G2);
  for (std::size_t i = 0; i < a1.size(); ++i) a1[i] += a2[i];
  CHECK(sup_diff(a12, a1) <= 1e-10);
}

TEST_CASE("riccati without control influence has zero feedback") {
  auto s = test::scalar_spec({.A = 0.4, .B = 0, .C = 0, .D = 0.5, .Q = 1, .R = 1, .S = 0, .G = 2});
  const TimeGrid grid(40, 1.0);
  auto r = solve_riccati(s, grid);
  CHECK(r.alphaStar.sup_norm() == 0.0);
  auto a0 = solve_a_ode(s, CoefficientPath::zeros(1, 1, grid));
  CHECK(sup_diff(r.aStar.values, a0.values) <= 1e-12);
}

TEST_CASE("scalar riccati closed form") {
  const double r = 1, g = 1, T = 1;
  auto s = test::scalar_spec({.B = 1, .R = r, .G = g, .T = T});
  const TimeGrid grid(1000, T);
  auto sol = solve_riccati(s, grid);
  double err = 0.0;
  for (std::size_t i = 0; i < grid.nodes(); ++i)
    err = std::max(err, std::abs(sol.aStar.at_node(i)(0, 0) - r * g / (r + g * (T - grid.t(i)))));
  CHECK(err <= 1e-8);
  CHECK(sol.aStar.at_node(0)(0, 0) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(sol.alphaStar.node(0)(0, 0) == doctest::Approx(-0.5).epsilon(1e-8));
}

TEST_CASE("riccati feedback satisfies the algebraic relation at every node") {
  auto s = cli::std_lq();
  for (auto scheme : {RiccatiScheme::Continuous, RiccatiScheme::PiecewiseConstantPolicy}) {
    auto r = solve_riccati(s, TimeGrid(100, s.dyn.T), scheme);
    for (std::size_t i = 0; i < r.aStar.values.size(); ++i) {
      const double t = r.aStar.grid.t(i);
      const Matrix expect = feedback_of(r.aStar.at_node(i), s.dyn.B.at(t), s.dyn.C.at(t), s.dyn.D.at(t), s.R.at(t), s.S.at(t));
      CHECK((r.alphaStar.node(i) - expect).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
}

TEST_CASE("riccati feedback is a fixed point of the policy-gradient step") {
  auto s = cli::std_lq();
  auto r = solve_riccati(s, TimeGrid(100, s.dyn.T), RiccatiScheme::PiecewiseConstantPolicy);
  auto next = lq::lq_pgm_step(s, r.alphaStar, 0.5);
  CHECK(sup_distance(next, r.alphaStar) <= 1e-8);
}

TEST_CASE("singular control weight is reported") {
  auto s = test::scalar_spec({.B = 1, .D = 0, .R = 0, .G = 1});
  CHECK_THROWS_AS(solve_riccati(s, TimeGrid(10, 1.0)), NumericError);
}

TEST_CASE("cost of the optimal feedback equals the reported value") {
  // The continuous scheme's value is that of the exact feedback; a policy
  // frozen on intervals loses O(dt^2), so a fine grid is used there.
  auto s = cli::std_lq();
  const Vector& x0 = s.dyn.x0;
  for (auto [scheme, steps] : {std::pair{RiccatiScheme::Continuous, std::size_t{1000}},
                               std::pair{RiccatiScheme::PiecewiseConstantPolicy, std::size_t{100}}}) {
    auto r = solve_riccati(s, TimeGrid(steps, s.dyn.T), scheme);
    auto P = solve_cost_lyapunov(s, r.alphaStar);
    const Matrix V = 0.5 * (r.valueCoeff.at_node(0) + r.valueCoeff.at_node(0).transpose());
    CHECK(std::abs(0.5 * x0.dot(P.at_node(0) * x0) - 0.5 * x0.dot(V * x0)) <= 1e-8);
  }
}

TEST_CASE("cost lyapunov vanishes with zero cost matrices") {
  auto s = test::scalar_spec({.A = 0.2, .B = 1, .C = 0.1, .D = 0.3, .Q = 0, .R = 0, .S = 0, .G = 0});
  std::mt19937_64 rng(1);
  const TimeGrid grid(10, 1.0);
  std::vector<Matrix> nodes;
  for (std::size_t i = 0; i < grid.nodes(); ++i) nodes.push_back(test::random_matrix(rng, 1, 1));
  for (const auto& v : solve_cost_lyapunov(s, CoefficientPath(grid, nodes)).values) CHECK(v(0, 0) == 0.0);
}

TEST_CASE("qp with nonnegative linear term has zero minimizer") {
  Matrix M(2, 2);
  M << 2, 0.5, 0.5, 1;
  auto r = nonneg_qp_min(M, Vector::Constant(2, 0.3));
  CHECK(r.xi.norm() == 0.0);
  CHECK(r.minValue == 0.0);
}

TEST_CASE("one-dimensional qp") {
  auto r = nonneg_qp_min(scalar(1), Vector::Constant(1, -1));
  CHECK(r.xi(0) == doctest::Approx(1.0));
  CHECK(r.minValue == doctest::Approx(-1.0));
}

TEST_CASE("qp matches projected gradient descent and satisfies KKT") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix X = test::random_matrix(rng, 5, 5);
    const Matrix M = X * X.transpose() + 0.5 * Matrix::Identity(5, 5);
    const Vector q = test::random_vector(rng, 5, 2.0);
    auto r = nonneg_qp_min(M, q);
    CHECK((r.xi - pgd_qp(M, q)).cwiseAbs().maxCoeff() <= 1e-8);
    const Vector g = M * r.xi + q;
    CHECK(r.xi.minCoeff() >= 0.0);
    CHECK((2.0 * g).minCoeff() >= -1e-10);
    CHECK(r.xi.cwiseProduct(g).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(r.minValue == doctest::Approx(r.xi.dot(M * r.xi) + 2 * r.xi.dot(q)).epsilon(1e-12));
  }
}

TEST_CASE("qp rejects indefinite matrices") {
  Matrix M(2, 2);
  M << 1, 0, 0, -1;
  CHECK_THROWS_AS(nonneg_qp_min(M, Vector::Zero(2)), SpecError);
}

TEST_CASE("cone reference without control effect") {
  auto s = test::scalar_spec({.B = 0, .C = 0, .D = 0, .Q = 0, .R = 1, .S = 0, .G = 1.6});
  s.dyn.constraint = ConstraintSet::positive_cone();
  auto ref = solve_cone_reference(s, TimeGrid(20, 1.0));
  for (std::size_t i = 0; i < ref.grid.nodes(); ++i) {
    CHECK(ref.Pplus[i] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(ref.Pminus[i] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(ref.xiPlus[i].norm() == 0.0);
    CHECK(ref.xiMinus[i].norm() == 0.0);
  }
}

TEST_CASE("cone reference requires a scalar state and the positive cone") {
  CHECK_THROWS_AS(solve_cone_reference(cli::std_lq(), TimeGrid(10, 1.0)), SpecError);
  CHECK_THROWS_AS(solve_cone_reference(cli::nonconvex_lq(), TimeGrid(10, 1.0)), SpecError);
}

TEST_CASE("cone-lq value is convex, nonnegative and above the unconstrained value") {
  auto s = cli::cone_lq();
  const TimeGrid grid(100, s.dyn.T);
  auto ref = solve_cone_reference(s, grid);
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    CHECK(ref.Pplus[i] >= 0.0);
    CHECK(ref.Pminus[i] >= 0.0);
  }
  auto free = solve_riccati(cli::nonconvex_lq(), grid);
  const double a0 = free.aStar.at_node(0)(0, 0);
  const double h = 0.5;
  for (int k = -20; k <= 20; ++k) {
    const double x = k * h;
    const double second = ref.value(0, x - h) - 2 * ref.value(0, x) + ref.value(0, x + h);
    CHECK(second >= -1e-8);
    CHECK(ref.value(0, x) >= 0.5 * a0 * x * x - 1e-10);
  }
  // The constraint binds: the free optimum is infeasible for some sign.
  CHECK(ref.value(0, 1.0) + ref.value(0, -1.0) > a0 + 1e-6);
}

TEST_CASE("cone reference controls satisfy KKT at every node") {
  auto s = cli::cone_lq();
  auto ref = solve_cone_reference(s, TimeGrid(100, s.dyn.T));
  for (std::size_t i = 0; i < ref.grid.nodes(); ++i)
    for (double sign : {1.0, -1.0}) {
      const Vector& xi = sign > 0 ? ref.xiPlus[i] : ref.xiMinus[i];
      const auto qp = cone_qp(s, ref.grid.t(i), sign > 0 ? ref.Pplus[i] : ref.Pminus[i], sign);
      const Vector g = qp.M * xi + qp.q;
      CHECK(xi.minCoeff() >= 0.0);
      CHECK(g.minCoeff() >= -1e-10);
      CHECK(xi.cwiseProduct(g).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("cone controls are feasible") {
  auto ref = solve_cone_reference(cli::cone_lq(), TimeGrid(50, 1.0));
  for (double x : {-3.0, -0.5, 0.0, 0.7, 4.0}) CHECK(ref.control(10, x).minCoeff() >= 0.0);
}

TEST_CASE("unconstrained minimizer of the cone subproblem is the riccati feedback") {
  // With P = a/2 the inner quadratic's free minimizer reproduces alpha(a).
  auto s = cli::nonconvex_lq();
  auto r = solve_riccati(s, TimeGrid(20, s.dyn.T));
  for (std::size_t i : {0, 7, 20}) {
    const double t = r.aStar.grid.t(i);
    const Matrix& a = r.aStar.at_node(i);
    const Matrix alpha = feedback_of(a, s.dyn.B.at(t), s.dyn.C.at(t), s.dyn.D.at(t), s.R.at(t), s.S.at(t));
    const auto qp = cone_qp(s, t, 0.5 * a(0, 0), 1.0);
    const Vector xi = -qp.M.ldlt().solve(qp.q);
    CHECK((xi - alpha.col(0)).cwiseAbs().maxCoeff() <= 1e-10);
    const auto qpMinus = cone_qp(s, t, 0.5 * a(0, 0), -1.0);
    CHECK((-qpMinus.M.ldlt().solve(qpMinus.q) + alpha.col(0)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}
