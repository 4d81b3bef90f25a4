#pragma once

#include "ppgm/mc/paths.h"
#include "ppgm/mc/stats.h"

namespace ppgm::mc {

/// Mean and standard error of sum_i f(t_i, X_i, u_i) dt + g(X_N).
EstimateWithError estimate_cost(const GeneralProblem& prob, const Policy& policy, std::size_t M,
                                const TimeGrid& grid, std::uint64_t seed, const StartSpec& start);
EstimateWithError estimate_cost(const GeneralProblem& prob, const Policy& policy, std::size_t M,
                                const TimeGrid& grid, std::uint64_t seed);

/// Squared H2 distance E int_0^T |u^A_t - u^B_t|^2 dt, where each policy
/// drives its own state path and both paths share the Brownian increments.
EstimateWithError estimate_h2_distance(const Dynamics& dyn, const Policy& policyA, const Policy& policyB,
                                       std::size_t M, const TimeGrid& grid, std::uint64_t seed,
                                       const StartSpec& start);
EstimateWithError estimate_h2_distance(const Dynamics& dyn, const Policy& policyA, const Policy& policyB,
                                       std::size_t M, const TimeGrid& grid, std::uint64_t seed);

/// Squared H2 norm E int_0^T |u_t|^2 dt of a policy along its own paths.
EstimateWithError estimate_h2_norm(const Dynamics& dyn, const Policy& policy, std::size_t M,
                                   const TimeGrid& grid, std::uint64_t seed, const StartSpec& start);

/// Per-path integrals sum_i |U_i|^2 dt of a batch.
std::vector<double> control_energy(const PathBatch& batch);

}  // namespace ppgm::mc
