#include "ppgm/mc/paths.h"

#include <cmath>
#include <sstream>

#include "ppgm/core/errors.h"
#include "ppgm/mc/parallel.h"
#include "ppgm/mc/random.h"

namespace ppgm::mc {

namespace {
constexpr double kBlowUp = 1e10;
}

Policy Policy::batched(Batch fn) {
  Policy p;
  p.batch_ = std::move(fn);
  return p;
}

Vector Policy::operator()(std::size_t node, double t, const Vector& x) const {
  if (point_) return point_(node, t, x);
  if (batch_) return batch_(node, t, x);
  throw UsageError("Policy: empty policy");
}

Matrix Policy::apply(std::size_t node, double t, const Matrix& X) const {
  if (batch_) return batch_(node, t, X);
  if (!point_) throw UsageError("Policy: empty policy");
  const auto M = static_cast<std::size_t>(X.cols());
  std::vector<Vector> cols(M);
  parallel_for(M, [&](std::size_t j) { cols[j] = point_(node, t, X.col(static_cast<Eigen::Index>(j))); });
  const Eigen::Index m = M > 0 ? cols[0].size() : 0;
  Matrix U(m, X.cols());
  for (std::size_t j = 0; j < M; ++j) {
    if (cols[j].size() != m) throw NumericError("Policy: controls of inconsistent dimension");
    U.col(static_cast<Eigen::Index>(j)) = cols[j];
  }
  return U;
}

Policy linear_policy(CoefficientPath alpha) {
  return Policy::batched(
      [alpha = std::move(alpha)](std::size_t, double t, const Matrix& X) -> Matrix { return alpha.at(t) * X; });
}

Policy open_loop_policy(std::vector<Vector> controls) {
  return Policy::batched([controls = std::move(controls)](std::size_t node, double, const Matrix& X) -> Matrix {
    return controls.at(std::min(node, controls.size() - 1)).replicate(1, X.cols());
  });
}

Policy zero_policy(Eigen::Index m) {
  return Policy::batched([m](std::size_t, double, const Matrix& X) -> Matrix { return Matrix::Zero(m, X.cols()); });
}

NoiseDraw draw_noise(Eigen::Index n, std::size_t M, const TimeGrid& grid, std::uint64_t seed,
                     const StartSpec& start) {
  if (start.kind == StartSpec::Kind::Fixed && start.x0.size() != n) {
    throw SpecError("draw_noise: start point has wrong dimension");
  }
  const auto N = static_cast<Eigen::Index>(grid.steps());
  NoiseDraw out{Matrix(static_cast<Eigen::Index>(M), N), std::vector<Vector>(M)};
  const double sd = std::sqrt(grid.dt());
  parallel_for(M, [&](std::size_t j) {
    Engine rng(substream_seed(seed, j));
    if (start.kind == StartSpec::Kind::UniformBox) {
      std::uniform_real_distribution<double> unif(start.lo, start.hi);
      Vector x(n);
      for (Eigen::Index k = 0; k < n; ++k) x[k] = unif(rng);
      out.starts[j] = std::move(x);
    } else {
      out.starts[j] = start.x0;
    }
    std::normal_distribution<double> normal(0.0, sd);
    for (Eigen::Index i = 0; i < N; ++i) out.dW(static_cast<Eigen::Index>(j), i) = normal(rng);
  });
  return out;
}

PathBatch simulate_with_noise(const Dynamics& dyn, const Policy& policy, const TimeGrid& grid,
                              const NoiseDraw& noise, std::uint64_t seed, const StartSpec& start) {
  dyn.validate();
  const auto M = static_cast<Eigen::Index>(noise.starts.size());
  const std::size_t N = grid.steps();
  const double dt = grid.dt();
  if (noise.dW.rows() != M || noise.dW.cols() != static_cast<Eigen::Index>(N)) {
    throw UsageError("simulate_paths: noise does not match the batch");
  }

  // Time-major sweep: one n x M state matrix per node.
  Matrix Xi(dyn.n, M);
  for (Eigen::Index j = 0; j < M; ++j) Xi.col(j) = noise.starts[static_cast<std::size_t>(j)];
  std::vector<Matrix> states{Xi};
  std::vector<Matrix> controls;
  states.reserve(N + 1);
  controls.reserve(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double t = grid.t(i);
    const auto ii = static_cast<Eigen::Index>(i);
    Matrix U = policy.apply(i, t, Xi);
    if (U.rows() != dyn.m || U.cols() != M) {
      throw NumericError("simulate_paths: policy returned controls of the wrong shape at node " + std::to_string(i));
    }
    for (Eigen::Index j = 0; j < M; ++j) {
      if (!U.col(j).allFinite()) {
        std::ostringstream os;
        os << "simulate_paths: policy returned a non-finite control on path " << j << " at node " << i;
        throw NumericError(os.str());
      }
    }
    const Matrix drift = dyn.A.at(t) * Xi + dyn.B.at(t) * U;
    const Matrix vol = dyn.C.at(t) * Xi + dyn.D.at(t) * U;
    Xi = Xi + drift * dt + (vol.array().rowwise() * noise.dW.col(ii).transpose().array()).matrix();
    for (Eigen::Index j = 0; j < M; ++j) {
      const double mag = Xi.col(j).cwiseAbs().maxCoeff();
      if (!(mag <= kBlowUp)) {
        std::ostringstream os;
        os << "simulate_paths: state blew up (|X| = " << mag << ") on path " << j << " at node " << i + 1;
        throw NumericError(os.str());
      }
    }
    states.push_back(Xi);
    controls.push_back(std::move(U));
  }

  PathBatch batch{grid, start, seed, std::vector<Matrix>(static_cast<std::size_t>(M)),
                  std::vector<Matrix>(static_cast<std::size_t>(M)), noise.dW};
  parallel_for(static_cast<std::size_t>(M), [&](std::size_t j) {
    const auto jj = static_cast<Eigen::Index>(j);
    Matrix X(dyn.n, static_cast<Eigen::Index>(N + 1));
    Matrix U(dyn.m, static_cast<Eigen::Index>(N));
    for (std::size_t i = 0; i <= N; ++i) X.col(static_cast<Eigen::Index>(i)) = states[i].col(jj);
    for (std::size_t i = 0; i < N; ++i) U.col(static_cast<Eigen::Index>(i)) = controls[i].col(jj);
    batch.X[j] = std::move(X);
    batch.U[j] = std::move(U);
  });
  return batch;
}

PathBatch simulate_paths(const Dynamics& dyn, const Policy& policy, std::size_t M, const TimeGrid& grid,
                         std::uint64_t seed, const StartSpec& start) {
  if (M < 1) throw SpecError("simulate_paths: batch size must be at least 1");
  const NoiseDraw noise = draw_noise(dyn.n, M, grid, seed, start);
  return simulate_with_noise(dyn, policy, grid, noise, seed, start);
}

}  // namespace ppgm::mc
