#include "ppgm/core/hamiltonian.h"

#include <sstream>

#include "ppgm/core/errors.h"

namespace ppgm {

namespace {

void check_dims(const Dynamics& dyn, const Vector& x, const Vector& u, const Vector& y, const Vector& z) {
  if (x.size() != dyn.n || y.size() != dyn.n || z.size() != dyn.n || u.size() != dyn.m) {
    throw SpecError("hamiltonian: argument dimensions do not match the problem");
  }
}

}  // namespace

double hamiltonian(const GeneralProblem& prob, double t, const Vector& x, const Vector& u,
                   const Vector& y, const Vector& z) {
  const auto& d = prob.dyn;
  check_dims(d, x, u, y, z);
  return y.dot(d.A.at(t) * x + d.B.at(t) * u) + z.dot(d.C.at(t) * x + d.D.at(t) * u) +
         prob.cost.running(t, x, u);
}

Vector hamiltonian_grad_u(const GeneralProblem& prob, double t, const Vector& x, const Vector& u,
                          const Vector& y, const Vector& z) {
  const auto& d = prob.dyn;
  check_dims(d, x, u, y, z);
  Vector fu = prob.cost.running_grad_u(t, x, u);
  if (fu.size() != d.m || !fu.allFinite()) {
    std::ostringstream os;
    os << "hamiltonian_grad_u: running cost gradient non-finite or mis-sized at t=" << t;
    throw NumericError(os.str());
  }
  return d.B.at(t).transpose() * y + d.D.at(t).transpose() * z + fu;
}

}  // namespace ppgm
