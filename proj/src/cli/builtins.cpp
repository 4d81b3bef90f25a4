#include "ppgm/cli/builtins.h"

#include <cmath>
#include <random>

#include "ppgm/core/errors.h"

namespace ppgm::cli {

namespace {

Matrix mat(Eigen::Index rows, Eigen::Index cols, std::initializer_list<double> row_major) {
  Matrix m(rows, cols);
  auto it = row_major.begin();
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = *it++;
  }
  return m;
}

LQSpec make_constant(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D,
                     const Matrix& Q, const Matrix& R, const Matrix& S, const Matrix& G,
                     ConstraintSet constraint = {}) {
  const double T = 1.0;
  Dynamics dyn{A.rows(),
               B.cols(),
               CoefficientPath::constant(A, T),
               CoefficientPath::constant(B, T),
               CoefficientPath::constant(C, T),
               CoefficientPath::constant(D, T),
               T,
               Vector::Ones(A.rows()),
               std::move(constraint)};
  LQSpec spec{std::move(dyn), CoefficientPath::constant(Q, T), CoefficientPath::constant(R, T),
              CoefficientPath::constant(S, T), G};
  spec.normalize();
  return spec;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"std-lq", "singular-lq", "nonconvex-lq", "cone-lq",
                                              "cosine-cost"};
  return names;
}

LQSpec std_lq() {
  const Matrix A = mat(2, 2, {0.041, 0.11, -0.25, 0.099});
  const Matrix B = mat(2, 3, {-0.177, -0.204, -0.157, 0.077, 0.052, 0.019});
  const Matrix C = mat(2, 2, {0.04, 0.093, -0.148, 0.189});
  const Matrix D = mat(2, 3, {-0.236, 0.085, 0.041, 0.029, -0.180, -0.151});
  const Matrix Q = mat(2, 2, {0.2, 0.2, 0.2, 0.2});
  const Matrix R = mat(3, 3, {1.217, 0.019, -0.236, 0.019, 0.809, 0.086, -0.236, 0.086, 1.264});
  return make_constant(A, B, C, D, Q, R, Matrix::Zero(3, 2), Matrix::Identity(2, 2));
}

LQSpec singular_lq() {
  const Matrix A = mat(2, 2, {0.292, 0.11, -0.25, 0.234});
  const Matrix B = mat(2, 2, {-0.177, -0.204, -0.157, 0.077});
  const Matrix C = mat(2, 2, {0.052, 0.019, 0.04, 0.093});
  const Matrix D = mat(2, 2, {0.852, 0.189, -0.236, 1.085});
  const Matrix G = mat(2, 2, {1.376, 0.01, 0.01, 0.539});
  return make_constant(A, B, C, D, Matrix::Zero(2, 2), Matrix::Zero(2, 2), Matrix::Zero(2, 2), G);
}

namespace {

LQSpec nonconvex_with(ConstraintSet constraint) {
  const Matrix A = mat(1, 1, {0.083});
  const Matrix C = mat(1, 1, {-0.314});
  const Matrix B = mat(1, 5, {0.22, -0.5, -0.198, -0.353, -0.408});
  const Matrix D = mat(1, 5, {-0.154, -0.103, 0.039, 0.081, 0.185});
  // Joint quadratic form [[Q, S'], [S, R]].
  const Matrix joint = mat(6, 6, {0.2,    0.335,  -0.482, 0.25,   0.489, 0.248,   //
                                  0.335,  0.868,  0.098,  -0.147, 0.065, 0.084,   //
                                  -0.482, 0.098,  0.839,  0.025,  0.007, 0.112,   //
                                  0.25,   -0.147, 0.025,  1.168,  0.173, 0.05,    //
                                  0.489,  0.065,  0.007,  0.173,  0.82,  0.059,   //
                                  0.248,  0.084,  0.112,  0.05,   0.059, 1.083});
  const Matrix Q = joint.topLeftCorner(1, 1);
  const Matrix S = joint.bottomLeftCorner(5, 1);
  const Matrix R = joint.bottomRightCorner(5, 5);
  return make_constant(A, B, C, D, Q, R, S, mat(1, 1, {0.78}), std::move(constraint));
}

}  // namespace

LQSpec nonconvex_lq() { return nonconvex_with(ConstraintSet::free()); }

LQSpec cone_lq() { return nonconvex_with(ConstraintSet::positive_cone()); }

Dynamics cosine_dynamics() {
  const Matrix B = mat(3, 3, {0.013, 0.027, 0.062, 0.099, 0.126, -0.158, 0.057, 0.028, 0.02});
  const Matrix D = mat(3, 3, {1.346, -0.11, 0.126, -0.134, 1.474, 0.153, 0.011, 0.064, 1.439});
  const Matrix Dinv = D.inverse();
  const Matrix C = -Dinv.transpose() * B.transpose();
  const Matrix A = -0.5 * B * Dinv * Dinv.transpose() * B.transpose();
  const double T = 1.0;
  Dynamics dyn{3,
               3,
               CoefficientPath::constant(A, T),
               CoefficientPath::constant(B, T),
               CoefficientPath::constant(C, T),
               CoefficientPath::constant(D, T),
               T,
               Vector::Ones(3),
               ConstraintSet::free()};
  dyn.validate();
  return dyn;
}

CostModel cosine_cost() {
  CostModel c;
  c.running = [](double, const Vector&, const Vector& u) { return -u.array().cos().sum(); };
  c.running_grad_x = [](double, const Vector& x, const Vector&) -> Vector { return Vector::Zero(x.size()); };
  c.running_grad_u = [](double, const Vector&, const Vector& u) -> Vector { return u.array().sin(); };
  c.terminal = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  c.terminal_grad = [](const Vector& x) -> Vector { return x; };
  return c;
}

GeneralProblem cosine_problem() { return GeneralProblem{cosine_dynamics(), cosine_cost(), "cosine-cost"}; }

bool is_lq_builtin(const std::string& name) {
  return name == "std-lq" || name == "singular-lq" || name == "nonconvex-lq" || name == "cone-lq";
}

LQSpec builtin_lq(const std::string& name) {
  if (name == "std-lq") return std_lq();
  if (name == "singular-lq") return singular_lq();
  if (name == "nonconvex-lq") return nonconvex_lq();
  if (name == "cone-lq") return cone_lq();
  throw SpecError("unknown LQ builtin '" + name + "'");
}

GeneralProblem builtin_problem(const std::string& name) {
  if (name == "cosine-cost") return cosine_problem();
  return to_general(builtin_lq(name), name);
}

LQSpec generate_random_spec(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw SpecError("generate_random_spec: n must be positive");
  std::mt19937_64 rng(seed);
  const double nd = static_cast<double>(n);
  auto draw = [&](Eigen::Index rows, Eigen::Index cols, double half_width) {
    std::uniform_real_distribution<double> unif(-half_width, half_width);
    Matrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = unif(rng);
    }
    return m;
  };
  const Matrix A = draw(n, n, 0.25 / nd);
  const Matrix B = draw(n, n, 0.25 / nd);
  const Matrix C = draw(n, n, 0.25 / nd);
  const Matrix D = draw(n, n, 0.25 / nd);
  const Matrix G0 = draw(n, n, 0.5);
  const Matrix S = draw(n, n, 0.5);
  const Matrix R0 = draw(n, n, 0.5 / nd);
  const Matrix I = Matrix::Identity(n, n);
  const Matrix G = I + 0.5 * (G0 + G0.transpose());
  const Matrix R = I + 0.5 * (R0 + R0.transpose());
  return make_constant(A, B, C, D, Matrix::Constant(n, n, 0.2), R, S, G);
}

}  // namespace ppgm::cli
