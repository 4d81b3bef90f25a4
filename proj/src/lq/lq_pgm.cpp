#include "ppgm/lq/lq_pgm.h"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "ppgm/core/errors.h"

namespace ppgm::lq {

namespace {

double relative(double num, double den) {
  return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
}

double sup_distance(const ode::MatrixOdeSolution& a, const ode::MatrixOdeSolution& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    s = std::max(s, (a.values[i] - b.values[i]).cwiseAbs().maxCoeff());
  }
  return s;
}

double sup_norm(const ode::MatrixOdeSolution& a) {
  double s = 0.0;
  for (const auto& v : a.values) s = std::max(s, v.cwiseAbs().maxCoeff());
  return s;
}

}  // namespace

CoefficientPath lq_pgm_update(const LQSpec& spec, const CoefficientPath& alpha,
                              const ode::MatrixOdeSolution& a, double tau) {
  const TimeGrid& grid = alpha.grid();
  const auto& d = spec.dyn;
  std::vector<Matrix> next;
  next.reserve(grid.nodes());
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    const double t = grid.t(i);
    const Matrix& al = alpha.node(i);
    const Matrix& ai = a.values[i];
    const Matrix& B = d.B.at(t);
    const Matrix& D = d.D.at(t);
    const Matrix grad = B.transpose() * ai + D.transpose() * ai * (d.C.at(t) + D * al) +
                        spec.R.at(t) * al + spec.S.at(t);
    next.push_back(al - tau * grad);
  }
  return CoefficientPath(grid, std::move(next));
}

CoefficientPath lq_pgm_step(const LQSpec& spec, const CoefficientPath& alpha, double tau) {
  if (!(tau > 0.0)) throw SpecError("lq_pgm_step: tau must be positive");
  if (!spec.dyn.constraint.is_free()) {
    throw SpecError("lq_pgm_step: LQ-PGM handles unconstrained problems only; use ppgm");
  }
  return lq_pgm_update(spec, alpha, ode::solve_a_ode(spec, alpha), tau);
}

CoefficientPath random_initial_alpha(const LQSpec& spec, const TimeGrid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-0.1, 0.1);
  std::vector<Matrix> values;
  values.reserve(grid.nodes());
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    Matrix v(spec.dyn.m, spec.dyn.n);
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      for (Eigen::Index r = 0; r < v.rows(); ++r) v(r, c) = unif(rng);
    }
    values.push_back(std::move(v));
  }
  return CoefficientPath(grid, std::move(values));
}

LqPgmResult run_lq_pgm(const LQSpec& spec, std::optional<CoefficientPath> alpha0,
                       const LqPgmOptions& opts, const ode::RiccatiSolution* reference) {
  if (!(opts.tau > 0.0)) throw SpecError("run_lq_pgm: tau must be positive");
  if (!(opts.tol > 0.0)) throw SpecError("run_lq_pgm: tol must be positive");
  if (opts.kmax < 1) throw SpecError("run_lq_pgm: kmax must be at least 1");
  if (!spec.dyn.constraint.is_free()) {
    throw SpecError("run_lq_pgm: LQ-PGM handles unconstrained problems only; use ppgm");
  }

  const auto start = std::chrono::steady_clock::now();
  CoefficientPath alpha = alpha0 ? std::move(*alpha0)
                                 : random_initial_alpha(spec, TimeGrid(opts.timeSteps, spec.dyn.T), opts.seed);
  if (reference && !(reference->alphaStar.grid() == alpha.grid())) {
    throw SpecError("run_lq_pgm: reference lives on a different grid than alpha");
  }
  const double ref_alpha_norm = reference ? reference->alphaStar.sup_norm() : 0.0;
  const double ref_a_norm = reference ? sup_norm(reference->aStar) : 0.0;

  ode::MatrixOdeSolution a = ode::solve_a_ode(spec, alpha);
  LqPgmResult out{alpha, a, {}, false};
  double prev_step = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t k = 1; k <= opts.kmax; ++k) {
    CoefficientPath next = lq_pgm_update(spec, alpha, a, opts.tau);
    const double norm = next.sup_norm();
    if (!std::isfinite(norm) || norm > opts.divergenceBound) {
      std::ostringstream os;
      os << "run_lq_pgm: iterate " << k << " has sup-norm " << norm << " > " << opts.divergenceBound
         << "; tau = " << opts.tau << " is too large for this problem, try a smaller step";
      throw DivergenceError(os.str());
    }
    const double step = ppgm::sup_distance(next, alpha);

    IterateRecord rec;
    rec.k = k;
    rec.deltaK = relative(step, alpha.sup_norm());
    if (k >= 2) rec.contractionRatio = relative(step, prev_step);
    alpha = std::move(next);
    a = ode::solve_a_ode(spec, alpha);
    if (reference) {
      rec.controlErr = relative(ppgm::sup_distance(alpha, reference->alphaStar), ref_alpha_norm);
      rec.valueErr = relative(sup_distance(a, reference->aStar), ref_a_norm);
    }
    if (opts.recordTiming) {
      rec.wallMillis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    out.history.push_back(rec);
    prev_step = step;
    if (rec.deltaK < opts.tol) {
      out.converged = true;
      break;
    }
  }
  out.alpha = std::move(alpha);
  out.a = std::move(a);
  return out;
}

}  // namespace ppgm::lq
