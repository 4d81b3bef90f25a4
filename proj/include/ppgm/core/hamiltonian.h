#pragma once

#include "ppgm/core/problem.h"

namespace ppgm {

/// H_t(x, u, y, z) = y'(A x + B u) + z'(C x + D u) + f_t(x, u).
double hamiltonian(const GeneralProblem& prob, double t, const Vector& x, const Vector& u,
                   const Vector& y, const Vector& z);

/// d/du H_t(x, u, y, z) = B'y + D'z + d/du f_t(x, u).
///
/// Throws NumericError if the cost gradient evaluator returns a non-finite value.
Vector hamiltonian_grad_u(const GeneralProblem& prob, double t, const Vector& x, const Vector& u,
                          const Vector& y, const Vector& z);

}  // namespace ppgm
