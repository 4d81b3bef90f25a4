#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ppgm/core/history.h"
#include "ppgm/core/problem.h"
#include "ppgm/mc/paths.h"
#include "ppgm/nn/mlp.h"
#include "ppgm/nn/optimizer.h"

namespace ppgm::deep {

struct PpgmConfig {
  double tau = 0.5;
  /// Learning rates of the BSDE networks and of the control network.
  double bsdeRate = 0.01;
  double controlRate = 0.01;
  std::size_t bsdeSteps = 100;
  std::size_t controlSteps = 100;
  std::size_t outerMax = 200;
  std::size_t batch = 50;
  std::size_t timeSteps = 10;
  /// Training start points are uniform over [boxLo, boxHi]^n.
  double boxLo = -10.0;
  double boxHi = 10.0;
  /// Outer tolerance on the relative policy change, and early-stop
  /// thresholds of the two sub-loops.
  double tolDelta = 1e-5;
  double tolBsde = 1e-10;
  double tolControl = 1e-10;
  nn::OptimizerKind optimizer = nn::OptimizerKind::Plain;
  std::uint64_t seed = 0;
  std::vector<Eigen::Index> hidden{10, 10};
  double initSigma = 0.1;
  /// Paths used for the policy-change estimate (on the training grid).
  std::size_t deltaPaths = 1000;

  /// Throws SpecError on non-positive rates, counts or tolerances.
  void validate() const;
};

/// Control network phi(t, x), BSDE networks Z(t, x) and y(x).
struct DeepState {
  nn::Mlp phiNet;
  nn::Mlp zNet;
  nn::Mlp yNet;
  std::size_t k = 0;
};

/// Fresh networks sized for the problem, inputs scaled to [-1, 1] over the
/// horizon and the sampling box.
DeepState init_state(const GeneralProblem& prob, const PpgmConfig& config);

/// Policy u = prox_U(phi(t, x)); outputs always lie in U.
mc::Policy network_policy(const nn::Mlp& phiNet, const ConstraintSet& constraint);

/// Tape record of one BSDE rollout. Y[i] and Z[i] hold one path per column.
struct RolloutRecord {
  nn::Tape::Var loss;
  std::vector<nn::Tape::Var> Y;
  std::vector<nn::Tape::Var> Z;
  nn::MlpBinding yParams;
  nn::MlpBinding zParams;
};

/// Records the forward rollout
///   (I + dt A_i') Y_{i+1} = Y_i - (C_i' Z_i + d/dx f(X_i, u_i)) dt + Z_i dW_i,  Y_0 = y(X_0),
/// with Z_i = Z(t_i, X_i) and loss (1/M) sum_j |Y_N - grad g(X_N)|^2.
/// Parameters are registered y first, then Z. Throws NumericError if
/// I + dt A_i' is singular (time step too large).
RolloutRecord record_dbsde_rollout(nn::Tape& tape, const GeneralProblem& prob, const nn::Mlp& zNet,
                                   const nn::Mlp& yNet, const mc::PathBatch& batch);

/// Loss value of record_dbsde_rollout.
double dbsde_rollout_loss(const GeneralProblem& prob, const nn::Mlp& zNet, const nn::Mlp& yNet,
                          const mc::PathBatch& batch);

/// Per-time values of a rollout, one n x M matrix per node.
struct RolloutValues {
  std::vector<Matrix> Y;
  std::vector<Matrix> Z;
  double loss = 0.0;
};
RolloutValues dbsde_rollout_values(const GeneralProblem& prob, const nn::Mlp& zNet, const nn::Mlp& yNet,
                                   const mc::PathBatch& batch);

struct DbsdeResult {
  std::vector<double> lossHistory;
  /// Batch simulated after the last step and the rollout on it.
  mc::PathBatch batch;
  RolloutValues values;
};

/// Up to bsdeSteps optimizer steps on (y, Z), one fresh batch per step,
/// stopping early once the loss drops below tolBsde. Updates the networks
/// in place. Throws DivergenceError naming the sub-step on a non-finite loss.
DbsdeResult dbsde_train(const GeneralProblem& prob, const nn::Mlp& phiNet, nn::Mlp& zNet, nn::Mlp& yNet,
                        const PpgmConfig& config, std::uint64_t seed);

/// Proximal targets prox_U(u_i - tau (B_i'Y_i + D_i'Z_i + d/du f(X_i, u_i)))
/// with u_i the controls recorded in the batch. One m x M matrix per node.
std::vector<Matrix> control_targets(const GeneralProblem& prob, const mc::PathBatch& batch,
                                    const std::vector<Matrix>& Y, const std::vector<Matrix>& Z, double tau);

/// Fit loss (1/(MN)) sum_{i,j} |phi(t_i, X_i) - target_ij|^2 of the raw
/// network output.
double control_fit_loss(const std::vector<Matrix>& targets, const mc::PathBatch& batch, const nn::Mlp& phiNet);

/// Gradient of control_fit_loss over phi's flat parameters.
Vector control_fit_gradient(const std::vector<Matrix>& targets, const mc::PathBatch& batch, const nn::Mlp& phiNet);

/// Up to controlSteps optimizer steps on the fit loss, starting from phiNet.
/// Returns the loss before each step and, last, the final loss.
std::vector<double> control_fit(const std::vector<Matrix>& targets, const mc::PathBatch& batch, nn::Mlp& phiNet,
                                const PpgmConfig& config);

/// Optional per-iteration errors against a reference solution, filled into
/// the history row.
using Monitor = std::function<void(const DeepState& state, IterateRecord& row)>;

struct PpgmResult {
  DeepState state;
  IterateHistory history;
  bool converged = false;
};

/// Outer loop: simulate under phi^k, train the BSDE networks, form proximal
/// targets, fit phi^{k+1}; stops once the relative H2 policy change drops
/// below tolDelta or after outerMax iterations. Networks are warm-started
/// across iterations. Throws DivergenceError naming k and the sub-step.
PpgmResult run_ppgm(const GeneralProblem& prob, const PpgmConfig& config, const Monitor& monitor = {},
                    std::optional<DeepState> initial = std::nullopt, bool recordTiming = false);

}  // namespace ppgm::deep
