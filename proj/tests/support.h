#pragma once

#include <cstdint>
#include <random>
#include <vector>
#include <cmath>
#include <algorithm>

#include "ppgm/core/problem.h"

namespace ppgm::test {

inline Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

struct ScalarData {
  double A = 0, B = 0, C = 0, D = 0;
  double Q = 0, R = 1, S = 0, G = 1;
  double T = 1, x0 = 1;
};

/// One-dimensional LQ problem with time-constant coefficients.
inline LQSpec scalar_spec(const ScalarData& d) {
  LQSpec s;
  s.dyn.n = 1;
  s.dyn.m = 1;
  s.dyn.T = d.T;
  s.dyn.A = CoefficientPath::constant(scalar(d.A), d.T);
  s.dyn.B = CoefficientPath::constant(scalar(d.B), d.T);
  s.dyn.C = CoefficientPath::constant(scalar(d.C), d.T);
  s.dyn.D = CoefficientPath::constant(scalar(d.D), d.T);
  s.dyn.x0 = Vector::Constant(1, d.x0);
  s.Q = CoefficientPath::constant(scalar(d.Q), d.T);
  s.R = CoefficientPath::constant(scalar(d.R), d.T);
  s.S = CoefficientPath::constant(scalar(d.S), d.T);
  s.G = scalar(d.G);
  return s;
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = u(rng);
  return m;
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  return random_matrix(rng, n, 1, scale);
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace ppgm::test

namespace ppgm::test {

/// R^2 of a least-squares line through (x, y).
inline double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  return syy == 0 ? 1.0 : sxy * sxy / (sxx * syy);
}

/// R^2 of log(error) against the iteration index over the leading stretch
/// where the error is still at least ten times its final plateau.
inline double pre_plateau_log_r2(const std::vector<double>& errors) {
  std::vector<double> k, logErr;
  const double plateau = errors.back();
  for (std::size_t i = 0; i < errors.size() && errors[i] >= 10.0 * plateau; ++i) {
    k.push_back(static_cast<double>(i + 1));
    logErr.push_back(std::log(errors[i]));
  }
  if (k.size() < 3) return 0.0;
  return r_squared(k, logErr);
}

}  // namespace ppgm::test

namespace ppgm::test {

// Plain RK4 on the a-ODE of the zero feedback with constant coefficients.
inline std::vector<Matrix> reference_a_zero_feedback(const LQSpec& s, std::size_t coarse, std::size_t refine) {
  const Matrix A = s.dyn.A.node(0), C = s.dyn.C.node(0), Q = s.Q.node(0);
  auto f = [&](const Matrix& a) -> Matrix { return -(a * A + A.transpose() * a + C.transpose() * a * C + Q); };
  const double h = s.dyn.T / static_cast<double>(coarse * refine);
  std::vector<Matrix> out(coarse + 1);
  Matrix a = s.G;
  out[coarse] = a;
  for (std::size_t i = coarse; i-- > 0;) {
    for (std::size_t r = 0; r < refine; ++r) {
      const Matrix k1 = f(a), k2 = f(a - 0.5 * h * k1), k3 = f(a - 0.5 * h * k2), k4 = f(a - h * k3);
      a = a - h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    out[i] = a;
  }
  return out;
}

}  // namespace ppgm::test
