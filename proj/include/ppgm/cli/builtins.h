#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppgm/core/problem.h"

namespace ppgm::cli {

/// Names accepted by builtin_problem / builtin_lq.
const std::vector<std::string>& builtin_names();

/// n = 2, m = 3 convex problem satisfying the standard assumption.
LQSpec std_lq();
/// n = m = 2 problem with R = 0 relying on terminal convexity (singular case i).
LQSpec singular_lq();
/// n = 1, m = 5 problem whose cross term S makes the cost non-convex.
LQSpec nonconvex_lq();
/// nonconvex_lq with controls restricted to the nonnegative orthant.
LQSpec cone_lq();
/// Dynamics of the n = m = 3 cosine-cost problem, built so that
/// A + A' + C'C = 0 and B + C'D = 0.
Dynamics cosine_dynamics();
/// -sum_i cos(u_i) running cost and |x|^2 / 2 terminal cost.
CostModel cosine_cost();
GeneralProblem cosine_problem();

/// True for builtins that are LQ problems (everything except cosine-cost).
bool is_lq_builtin(const std::string& name);
LQSpec builtin_lq(const std::string& name);
GeneralProblem builtin_problem(const std::string& name);

/// Random n = m problem with T = 1:
///   A, B, C, D ~ Unif(-0.25/n, 0.25/n) constant in t,
///   G = I + (G0 + G0')/2 with G0 ~ Unif(-0.5, 0.5),  Q = 0.2 everywhere,
///   S ~ Unif(-0.5, 0.5),  R = I + (R0 + R0')/2 with R0 ~ Unif(-0.5/n, 0.5/n),
///   x0 = (1, ..., 1).
LQSpec generate_random_spec(Eigen::Index n, std::uint64_t seed);

}  // namespace ppgm::cli
