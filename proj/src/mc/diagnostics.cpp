#include "ppgm/mc/diagnostics.h"

#include <cmath>
#include <iostream>

#include "ppgm/core/errors.h"
#include "ppgm/core/hamiltonian.h"
#include "ppgm/mc/parallel.h"
#include "ppgm/mc/random.h"
#include "ppgm/ode/lq_odes.h"

namespace ppgm::mc {

AdjointEvaluator lq_adjoint(const LQSpec& spec, const CoefficientPath& alpha) {
  const CoefficientPath a = ode::solve_a_ode(spec, alpha).as_path();
  return [a, alpha, C = spec.dyn.C, D = spec.dyn.D](std::size_t, double t, const Vector& x) {
    const Matrix& at = a.at(t);
    const Vector y = at * x;
    const Vector z = at * ((C.at(t) + D.at(t) * alpha.at(t)) * x);
    return AdjointValue{y, z};
  };
}

CoercivityEstimate estimate_coercivity(const Dynamics& dyn, std::size_t probes, std::size_t M,
                                       const TimeGrid& grid, std::uint64_t seed) {
  if (probes < 10) throw SpecError("estimate_coercivity: need at least 10 probes");
  if (M < 2) throw SpecError("estimate_coercivity: need at least 2 paths per probe");
  const StartSpec start = StartSpec::fixed(Vector::Zero(dyn.n));
  const NoiseDraw noise = draw_noise(dyn.n, M, grid, child_seed(seed, 0), start);
  const std::size_t N = grid.steps();

  CoercivityEstimate out;
  bool first = true;
  for (std::size_t p = 0; p < probes; ++p) {
    Engine rng(child_seed(seed, p + 1));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vector> u(N, Vector(dyn.m));
    double norm2 = 0.0;
    for (auto& ui : u) {
      for (Eigen::Index k = 0; k < dyn.m; ++k) ui[k] = normal(rng);
      norm2 += ui.squaredNorm() * grid.dt();
    }
    if (!(norm2 > 0.0)) {
      ++out.skipped;
      continue;
    }
    const PathBatch batch = simulate_with_noise(dyn, open_loop_policy(std::move(u)), grid, noise, seed, start);
    std::vector<double> end(M);
    for (std::size_t j = 0; j < M; ++j) end[j] = batch.X[j].col(static_cast<Eigen::Index>(N)).squaredNorm();
    const EstimateWithError e = summarize(end);
    const double ratio = e.mean / norm2;
    const double se = e.stdErr / norm2;
    out.ratios.push_back(ratio);
    if (first || ratio < out.lambdaMin) {
      out.lambdaMin = ratio;
      out.lambdaMinStdErr = se;
    }
    if (first || ratio > out.opNormSq) {
      out.opNormSq = ratio;
      out.opNormSqStdErr = se;
    }
    first = false;
  }
  out.probes = out.ratios.size();
  if (out.skipped > 0) {
    std::cerr << "warning: estimate_coercivity skipped " << out.skipped << " zero-norm probe(s)\n";
  }
  return out;
}

EstimateWithError check_duality(const LQSpec& spec, const CoefficientPath& alpha, std::size_t M,
                                const TimeGrid& grid, std::uint64_t seed) {
  if (!spec.dyn.constraint.is_free()) throw SpecError("check_duality: requires an unconstrained problem");
  const Dynamics& dyn = spec.dyn;
  const StartSpec start = StartSpec::fixed(dyn.x0);
  const NoiseDraw noise = draw_noise(dyn.n, M, grid, seed, start);
  const PathBatch batch = simulate_with_noise(dyn, linear_policy(alpha), grid, noise, seed, start);
  const std::size_t N = grid.steps();
  const double dt = grid.dt();
  const Matrix I = Matrix::Identity(dyn.n, dyn.n);

  // Discrete adjoint of the Euler scheme, so the identity holds exactly for
  // the simulated paths:
  //   a_i = (I + A dt)' a_{i+1} (I + F dt) + C' a_{i+1} K dt + (Q + S'alpha) dt,
  // with F = A + B alpha, K = C + D alpha read at t_i.
  std::vector<Matrix> yMap(N), zMap(N);
  Matrix a = spec.G;
  for (std::size_t i = N; i-- > 0;) {
    const double t = grid.t(i);
    const Matrix& al = alpha.at(t);
    const Matrix F = dyn.A.at(t) + dyn.B.at(t) * al;
    const Matrix K = dyn.C.at(t) + dyn.D.at(t) * al;
    yMap[i] = a * (I + F * dt);
    zMap[i] = a * K;
    a = (I + dyn.A.at(t) * dt).transpose() * yMap[i] + dyn.C.at(t).transpose() * zMap[i] * dt +
        (spec.Q.at(t) + spec.S.at(t).transpose() * al) * dt;
  }

  std::vector<double> samples(M);
  parallel_for(M, [&](std::size_t j) {
    const Matrix& X = batch.X[j];
    const Matrix& U = batch.U[j];
    // Zero-start state under the same control and noise.
    Vector xz = Vector::Zero(dyn.n);
    std::vector<double> terms(N + 1);
    for (std::size_t i = 0; i < N; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double t = grid.t(i);
      const Vector x = X.col(ii);
      const Vector u = U.col(ii);
      const Vector xi = spec.Q.at(t) * x + spec.S.at(t).transpose() * u;
      const Matrix& B = dyn.B.at(t);
      const Matrix& D = dyn.D.at(t);
      terms[i] = -(u.dot(B.transpose() * (yMap[i] * x) + D.transpose() * (zMap[i] * x)) - xz.dot(xi)) * dt;
      const double dw = noise.dW(static_cast<Eigen::Index>(j), ii);
      xz = xz + (dyn.A.at(t) * xz + B * u) * dt + (dyn.C.at(t) * xz + D * u) * dw;
    }
    terms[N] = xz.dot(spec.G * X.col(static_cast<Eigen::Index>(N)));
    samples[j] = pairwise_sum(terms);
  });
  return summarize(samples);
}

EstimateWithError stationarity_residual(const GeneralProblem& prob, const Policy& policy,
                                        const AdjointEvaluator& adjoint, double tau, std::size_t M,
                                        const TimeGrid& grid, std::uint64_t seed, const StartSpec& start) {
  if (!(tau > 0.0)) throw SpecError("stationarity_residual: tau must be positive");
  const PathBatch batch = simulate_paths(prob.dyn, policy, M, grid, seed, start);
  const std::size_t N = grid.steps();
  const double dt = grid.dt();
  std::vector<double> samples(M);
  parallel_for(M, [&](std::size_t j) {
    std::vector<double> terms(N);
    for (std::size_t i = 0; i < N; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double t = grid.t(i);
      const Vector x = batch.X[j].col(ii);
      const Vector u = batch.U[j].col(ii);
      const AdjointValue yz = adjoint(i, t, x);
      const Vector g = hamiltonian_grad_u(prob, t, x, u, yz.y, yz.z);
      terms[i] = (u - prox_project(prob.dyn.constraint, u - tau * g)).squaredNorm() * dt;
    }
    samples[j] = pairwise_sum(terms);
  });
  const EstimateWithError sq = summarize(samples);
  EstimateWithError out;
  out.M = sq.M;
  out.mean = std::sqrt(std::max(0.0, sq.mean));
  out.stdErr = out.mean > 0.0 ? sq.stdErr / (2.0 * out.mean) : sq.stdErr;
  return out;
}

EstimateWithError stationarity_residual(const GeneralProblem& prob, const Policy& policy,
                                        const AdjointEvaluator& adjoint, double tau, std::size_t M,
                                        const TimeGrid& grid, std::uint64_t seed) {
  return stationarity_residual(prob, policy, adjoint, tau, M, grid, seed, StartSpec::fixed(prob.dyn.x0));
}

}  // namespace ppgm::mc
