#include "ppgm/deep/ppgm.h"

#include <chrono>
#include <cmath>
#include <sstream>

#include "ppgm/core/errors.h"
#include "ppgm/mc/estimators.h"
#include "ppgm/mc/random.h"

namespace ppgm::deep {

namespace {

using nn::Tape;

Matrix node_states(const mc::PathBatch& batch, std::size_t i) {
  const auto M = static_cast<Eigen::Index>(batch.size());
  Matrix X(batch.X.front().rows(), M);
  for (Eigen::Index j = 0; j < M; ++j) X.col(j) = batch.X[static_cast<std::size_t>(j)].col(static_cast<Eigen::Index>(i));
  return X;
}

Matrix node_controls(const mc::PathBatch& batch, std::size_t i) {
  const auto M = static_cast<Eigen::Index>(batch.size());
  Matrix U(batch.U.front().rows(), M);
  for (Eigen::Index j = 0; j < M; ++j) U.col(j) = batch.U[static_cast<std::size_t>(j)].col(static_cast<Eigen::Index>(i));
  return U;
}

/// Rows [t; X] as network input.
Matrix time_state_input(double t, const Matrix& X) {
  Matrix in(X.rows() + 1, X.cols());
  in.row(0).setConstant(t);
  in.bottomRows(X.rows()) = X;
  return in;
}

Matrix columnwise(const Matrix& X, const Matrix& U,
                  const std::function<Vector(const Vector&, const Vector&)>& fn, Eigen::Index rows) {
  Matrix out(rows, X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) out.col(j) = fn(X.col(j), U.col(j));
  return out;
}

void check_finite(const nn::Mlp& net, const char* what, std::size_t step) {
  if (!net.params().allFinite()) {
    std::ostringstream os;
    os << what << ": non-finite parameters after sub-step " << step;
    throw DivergenceError(os.str());
  }
}

mc::StartSpec training_start(const PpgmConfig& config) { return mc::StartSpec::uniform_box(config.boxLo, config.boxHi); }

}  // namespace

void PpgmConfig::validate() const {
  if (!(tau > 0.0)) throw SpecError("ppgm config: tau must be positive");
  if (!(bsdeRate > 0.0) || !(controlRate > 0.0)) throw SpecError("ppgm config: learning rates must be positive");
  if (bsdeSteps < 1 || controlSteps < 1 || outerMax < 1) throw SpecError("ppgm config: step counts must be positive");
  if (batch < 2) throw SpecError("ppgm config: batch must be at least 2");
  if (timeSteps < 1) throw SpecError("ppgm config: timeSteps must be positive");
  if (!(boxLo < boxHi)) throw SpecError("ppgm config: sampling box must have lo < hi");
  if (!(tolDelta > 0.0) || !(tolBsde > 0.0) || !(tolControl > 0.0)) {
    throw SpecError("ppgm config: tolerances must be positive");
  }
  if (hidden.empty()) throw SpecError("ppgm config: need at least one hidden layer");
  if (!(initSigma >= 0.0)) throw SpecError("ppgm config: initSigma must be non-negative");
  if (deltaPaths < 2) throw SpecError("ppgm config: deltaPaths must be at least 2");
}

DeepState init_state(const GeneralProblem& prob, const PpgmConfig& config) {
  const Eigen::Index n = prob.dyn.n;
  const Eigen::Index m = prob.dyn.m;
  const double xScale = std::max(std::abs(config.boxLo), std::abs(config.boxHi));
  DeepState s;
  s.phiNet = nn::time_state_net(n, m, config.hidden, prob.dyn.T, xScale, mc::child_seed(config.seed, 1), config.initSigma);
  s.zNet = nn::time_state_net(n, n, config.hidden, prob.dyn.T, xScale, mc::child_seed(config.seed, 2), config.initSigma);
  s.yNet = nn::state_net(n, n, config.hidden, xScale, mc::child_seed(config.seed, 3), config.initSigma);
  return s;
}

mc::Policy network_policy(const nn::Mlp& phiNet, const ConstraintSet& constraint) {
  return mc::Policy::batched([phiNet, constraint](std::size_t, double t, const Matrix& X) -> Matrix {
    Matrix U = phiNet.forward_batch(time_state_input(t, X));
    prox_project_columns(constraint, U);
    return U;
  });
}

RolloutRecord record_dbsde_rollout(Tape& tape, const GeneralProblem& prob, const nn::Mlp& zNet, const nn::Mlp& yNet,
                                   const mc::PathBatch& batch) {
  const Dynamics& dyn = prob.dyn;
  const TimeGrid& grid = batch.grid;
  const std::size_t N = grid.steps();
  const double dt = grid.dt();
  const auto M = static_cast<double>(batch.size());

  RolloutRecord rec;
  rec.yParams = nn::bind(tape, yNet);
  rec.zParams = nn::bind(tape, zNet);

  Matrix X = node_states(batch, 0);
  Tape::Var Y = nn::mlp_record(tape, yNet, rec.yParams, X);
  rec.Y.push_back(Y);
  const Matrix I = Matrix::Identity(dyn.n, dyn.n);
  for (std::size_t i = 0; i < N; ++i) {
    const double t = grid.t(i);
    const Matrix U = node_controls(batch, i);
    Tape::Var Z = nn::mlp_record(tape, zNet, rec.zParams, time_state_input(t, X));
    rec.Z.push_back(Z);

    const Matrix K = I + dt * dyn.A.at(t).transpose();
    Eigen::PartialPivLU<Matrix> lu(K);
    if (!(std::abs(lu.determinant()) > 1e-12) || !(lu.rcond() > 1e-12)) {
      throw NumericError("dbsde rollout: I + dt A' is singular at node " + std::to_string(i) +
                         "; reduce the time step");
    }
    const Matrix fx = columnwise(X, U, [&](const Vector& x, const Vector& u) { return prob.cost.running_grad_x(t, x, u); },
                                 dyn.n);
    Tape::Var drift = tape.add(tape.left_multiply(dyn.C.at(t).transpose(), Z), tape.constant(fx));
    Tape::Var rhs = tape.add(tape.sub(Y, tape.scale(drift, dt)),
                             tape.scale_columns(Z, batch.dW.col(static_cast<Eigen::Index>(i)).transpose()));
    Y = tape.left_multiply(lu.inverse(), rhs);
    rec.Y.push_back(Y);
    X = node_states(batch, i + 1);
  }
  Matrix target(dyn.n, X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) target.col(j) = prob.cost.terminal_grad(X.col(j));
  rec.loss = tape.sum_squares(tape.sub(Y, tape.constant(std::move(target))), 1.0 / M);
  return rec;
}

double dbsde_rollout_loss(const GeneralProblem& prob, const nn::Mlp& zNet, const nn::Mlp& yNet,
                          const mc::PathBatch& batch) {
  Tape tape;
  const RolloutRecord rec = record_dbsde_rollout(tape, prob, zNet, yNet, batch);
  return tape.value(rec.loss)(0, 0);
}

RolloutValues dbsde_rollout_values(const GeneralProblem& prob, const nn::Mlp& zNet, const nn::Mlp& yNet,
                                   const mc::PathBatch& batch) {
  Tape tape;
  const RolloutRecord rec = record_dbsde_rollout(tape, prob, zNet, yNet, batch);
  RolloutValues out;
  for (auto v : rec.Y) out.Y.push_back(tape.value(v));
  for (auto v : rec.Z) out.Z.push_back(tape.value(v));
  out.loss = tape.value(rec.loss)(0, 0);
  return out;
}

DbsdeResult dbsde_train(const GeneralProblem& prob, const nn::Mlp& phiNet, nn::Mlp& zNet, nn::Mlp& yNet,
                        const PpgmConfig& config, std::uint64_t seed) {
  const TimeGrid grid(config.timeSteps, prob.dyn.T);
  const mc::Policy policy = network_policy(phiNet, prob.dyn.constraint);
  const mc::StartSpec start = training_start(config);
  nn::OptimizerState opt = nn::make_optimizer(config.optimizer, config.bsdeRate);
  const auto ny = static_cast<Eigen::Index>(yNet.parameter_count());
  const auto nz = static_cast<Eigen::Index>(zNet.parameter_count());

  DbsdeResult out;
  for (std::size_t l = 0; l < config.bsdeSteps; ++l) {
    const mc::PathBatch batch = mc::simulate_paths(prob.dyn, policy, config.batch, grid, mc::child_seed(seed, l), start);
    Tape tape;
    const RolloutRecord rec = record_dbsde_rollout(tape, prob, zNet, yNet, batch);
    const double loss = tape.value(rec.loss)(0, 0);
    if (!std::isfinite(loss)) {
      throw DivergenceError("dbsde_train: non-finite loss at sub-step " + std::to_string(l));
    }
    out.lossHistory.push_back(loss);
    if (loss < config.tolBsde) break;
    const Vector g = tape.grad(rec.loss);
    Vector p(ny + nz);
    p << yNet.params(), zNet.params();
    p = nn::optimizer_step(opt, p, g);
    yNet.set_params(p.head(ny));
    zNet.set_params(p.tail(nz));
    check_finite(yNet, "dbsde_train", l);
    check_finite(zNet, "dbsde_train", l);
  }
  out.batch = mc::simulate_paths(prob.dyn, policy, config.batch, grid, mc::child_seed(seed, config.bsdeSteps), start);
  out.values = dbsde_rollout_values(prob, zNet, yNet, out.batch);
  if (!std::isfinite(out.values.loss)) throw DivergenceError("dbsde_train: non-finite loss on the final batch");
  return out;
}

std::vector<Matrix> control_targets(const GeneralProblem& prob, const mc::PathBatch& batch,
                                    const std::vector<Matrix>& Y, const std::vector<Matrix>& Z, double tau) {
  const std::size_t N = batch.grid.steps();
  if (Y.size() < N || Z.size() < N) throw UsageError("control_targets: adjoint values do not cover the grid");
  std::vector<Matrix> out(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double t = batch.grid.t(i);
    const Matrix X = node_states(batch, i);
    const Matrix U = node_controls(batch, i);
    const Matrix fu = columnwise(X, U, [&](const Vector& x, const Vector& u) { return prob.cost.running_grad_u(t, x, u); },
                                 prob.dyn.m);
    Matrix step = U - tau * (prob.dyn.B.at(t).transpose() * Y[i] + prob.dyn.D.at(t).transpose() * Z[i] + fu);
    prox_project_columns(prob.dyn.constraint, step);
    out[i] = std::move(step);
  }
  return out;
}

namespace {

/// Inputs (t_i, X_i) and targets of every node stacked column-wise.
std::pair<Matrix, Matrix> fit_data(const std::vector<Matrix>& targets, const mc::PathBatch& batch) {
  const std::size_t N = batch.grid.steps();
  if (targets.size() != N) throw UsageError("control_fit: targets do not match the batch grid");
  const auto M = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index n = batch.X.front().rows();
  const Eigen::Index m = targets.front().rows();
  Matrix in(n + 1, M * static_cast<Eigen::Index>(N));
  Matrix tg(m, in.cols());
  for (std::size_t i = 0; i < N; ++i) {
    const auto off = static_cast<Eigen::Index>(i) * M;
    in.middleCols(off, M) = time_state_input(batch.grid.t(i), node_states(batch, i));
    tg.middleCols(off, M) = targets[i];
  }
  return {std::move(in), std::move(tg)};
}

Tape::Var record_fit_loss(Tape& tape, const nn::Mlp& phiNet, const Matrix& in, const Matrix& tg) {
  const nn::MlpBinding params = nn::bind(tape, phiNet);
  const Tape::Var out = nn::mlp_record(tape, phiNet, params, in);
  return tape.sum_squares(tape.sub(out, tape.constant(tg)), 1.0 / static_cast<double>(in.cols()));
}

}  // namespace

double control_fit_loss(const std::vector<Matrix>& targets, const mc::PathBatch& batch, const nn::Mlp& phiNet) {
  const auto [in, tg] = fit_data(targets, batch);
  return (phiNet.forward_batch(in) - tg).squaredNorm() / static_cast<double>(in.cols());
}

Vector control_fit_gradient(const std::vector<Matrix>& targets, const mc::PathBatch& batch, const nn::Mlp& phiNet) {
  const auto [in, tg] = fit_data(targets, batch);
  Tape tape;
  return tape.grad(record_fit_loss(tape, phiNet, in, tg));
}

std::vector<double> control_fit(const std::vector<Matrix>& targets, const mc::PathBatch& batch, nn::Mlp& phiNet,
                                const PpgmConfig& config) {
  const auto [in, tg] = fit_data(targets, batch);
  const double weight = 1.0 / static_cast<double>(in.cols());
  nn::OptimizerState opt = nn::make_optimizer(config.optimizer, config.controlRate);
  std::vector<double> losses;
  for (std::size_t l = 0; l < config.controlSteps; ++l) {
    Tape tape;
    const Tape::Var loss = record_fit_loss(tape, phiNet, in, tg);
    const double value = tape.value(loss)(0, 0);
    if (!std::isfinite(value)) throw DivergenceError("control_fit: non-finite loss at sub-step " + std::to_string(l));
    losses.push_back(value);
    if (value < config.tolControl) return losses;
    phiNet.set_params(nn::optimizer_step(opt, phiNet.params(), tape.grad(loss)));
    check_finite(phiNet, "control_fit", l);
  }
  losses.push_back((phiNet.forward_batch(in) - tg).squaredNorm() * weight);
  return losses;
}

PpgmResult run_ppgm(const GeneralProblem& prob, const PpgmConfig& config, const Monitor& monitor,
                    std::optional<DeepState> initial, bool recordTiming) {
  config.validate();
  prob.dyn.validate();
  PpgmResult result;
  result.state = initial ? std::move(*initial) : init_state(prob, config);
  DeepState& s = result.state;
  const TimeGrid grid(config.timeSteps, prob.dyn.T);
  const mc::StartSpec start = training_start(config);

  while (s.k < config.outerMax) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t kseed = mc::child_seed(config.seed, 1000 + s.k);
    IterateRecord row;
    row.k = s.k + 1;
    const nn::Mlp previous = s.phiNet;
    try {
      const DbsdeResult bsde = dbsde_train(prob, s.phiNet, s.zNet, s.yNet, config, kseed);
      row.bsdeLoss = bsde.values.loss;
      const std::vector<Matrix> targets = control_targets(prob, bsde.batch, bsde.values.Y, bsde.values.Z, config.tau);
      const std::vector<double> fit = control_fit(targets, bsde.batch, s.phiNet, config);
      row.controlLoss = fit.back();

      const std::uint64_t dseed = mc::child_seed(kseed, 0xde17a);
      const mc::Policy before = network_policy(previous, prob.dyn.constraint);
      const mc::Policy after = network_policy(s.phiNet, prob.dyn.constraint);
      const double dist = mc::estimate_h2_distance(prob.dyn, before, after, config.deltaPaths, grid, dseed, start).mean;
      const double norm = mc::estimate_h2_norm(prob.dyn, before, config.deltaPaths, grid, dseed, start).mean;
      row.deltaK = norm > 0.0 ? std::sqrt(dist / norm) : std::sqrt(dist);
      if (!std::isfinite(row.deltaK)) throw NumericError("non-finite policy change");
    } catch (const NumericError& e) {
      // Blow-up anywhere in the iteration means the step sizes are too large.
      throw DivergenceError("outer iteration " + std::to_string(s.k + 1) + ": " + e.what());
    }
    ++s.k;
    if (monitor) monitor(s, row);
    if (recordTiming) {
      row.wallMillis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
    result.history.push_back(row);
    if (row.deltaK < config.tolDelta) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace ppgm::deep
