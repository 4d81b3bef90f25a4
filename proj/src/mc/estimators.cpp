#include "ppgm/mc/estimators.h"

#include <cmath>

#include "ppgm/core/errors.h"
#include "ppgm/mc/parallel.h"

namespace ppgm::mc {

EstimateWithError estimate_cost(const GeneralProblem& prob, const Policy& policy, std::size_t M,
                                const TimeGrid& grid, std::uint64_t seed, const StartSpec& start) {
  const PathBatch batch = simulate_paths(prob.dyn, policy, M, grid, seed, start);
  const double dt = grid.dt();
  const std::size_t N = grid.steps();
  std::vector<double> samples(M);
  parallel_for(M, [&](std::size_t j) {
    const Matrix& X = batch.X[j];
    const Matrix& U = batch.U[j];
    std::vector<double> terms(N + 1);
    for (std::size_t i = 0; i < N; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      terms[i] = prob.cost.running(grid.t(i), X.col(ii), U.col(ii)) * dt;
    }
    terms[N] = prob.cost.terminal(X.col(static_cast<Eigen::Index>(N)));
    samples[j] = pairwise_sum(terms);
    if (!std::isfinite(samples[j])) {
      throw NumericError("estimate_cost: non-finite cost on path " + std::to_string(j));
    }
  });
  return summarize(samples);
}

EstimateWithError estimate_cost(const GeneralProblem& prob, const Policy& policy, std::size_t M,
                                const TimeGrid& grid, std::uint64_t seed) {
  return estimate_cost(prob, policy, M, grid, seed, StartSpec::fixed(prob.dyn.x0));
}

std::vector<double> control_energy(const PathBatch& batch) {
  const double dt = batch.grid.dt();
  std::vector<double> out(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) out[j] = batch.U[j].colwise().squaredNorm().sum() * dt;
  return out;
}

EstimateWithError estimate_h2_distance(const Dynamics& dyn, const Policy& policyA, const Policy& policyB,
                                       std::size_t M, const TimeGrid& grid, std::uint64_t seed,
                                       const StartSpec& start) {
  if (M < 1) throw SpecError("estimate_h2_distance: batch size must be at least 1");
  const NoiseDraw noise = draw_noise(dyn.n, M, grid, seed, start);
  const PathBatch a = simulate_with_noise(dyn, policyA, grid, noise, seed, start);
  const PathBatch b = simulate_with_noise(dyn, policyB, grid, noise, seed, start);
  const double dt = grid.dt();
  std::vector<double> samples(M);
  for (std::size_t j = 0; j < M; ++j) samples[j] = (a.U[j] - b.U[j]).colwise().squaredNorm().sum() * dt;
  return summarize(samples);
}

EstimateWithError estimate_h2_distance(const Dynamics& dyn, const Policy& policyA, const Policy& policyB,
                                       std::size_t M, const TimeGrid& grid, std::uint64_t seed) {
  return estimate_h2_distance(dyn, policyA, policyB, M, grid, seed, StartSpec::fixed(dyn.x0));
}

EstimateWithError estimate_h2_norm(const Dynamics& dyn, const Policy& policy, std::size_t M,
                                   const TimeGrid& grid, std::uint64_t seed, const StartSpec& start) {
  const PathBatch batch = simulate_paths(dyn, policy, M, grid, seed, start);
  const std::vector<double> e = control_energy(batch);
  return summarize(e);
}

}  // namespace ppgm::mc
