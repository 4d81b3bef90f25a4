#pragma once

#include <cstdint>
#include <functional>
#include <type_traits>
#include <vector>

#include "ppgm/core/problem.h"

namespace ppgm::mc {

/// Control rule u = policy(node, t, x). Open-loop controls ignore x.
///
/// A policy is built either from a per-state callable or, via batched(), from
/// a callable taking one state per column; the latter lets network policies
/// evaluate a whole batch at once. Both forms must be safe to call
/// concurrently.
class Policy {
 public:
  using Point = std::function<Vector(std::size_t node, double t, const Vector& x)>;
  using Batch = std::function<Matrix(std::size_t node, double t, const Matrix& X)>;

  Policy() = default;
  template <class F>
    requires std::is_invocable_r_v<Vector, F, std::size_t, double, const Vector&>
  Policy(F f) : point_(std::move(f)) {}

  static Policy batched(Batch fn);

  Vector operator()(std::size_t node, double t, const Vector& x) const;
  /// Controls for every column of X.
  Matrix apply(std::size_t node, double t, const Matrix& X) const;
  explicit operator bool() const { return point_ || batch_; }

 private:
  Point point_;
  Batch batch_;
};

/// Feedback u = alpha_t x for a linear coefficient path.
Policy linear_policy(CoefficientPath alpha);
/// Deterministic open-loop control, one vector per grid interval.
Policy open_loop_policy(std::vector<Vector> controls);
Policy zero_policy(Eigen::Index m);

/// Where paths start: a fixed point, or uniform over the box [lo, hi]^n.
struct StartSpec {
  enum class Kind { Fixed, UniformBox } kind = Kind::Fixed;
  Vector x0;
  double lo = -10.0;
  double hi = 10.0;

  static StartSpec fixed(Vector x) { return {Kind::Fixed, std::move(x), 0.0, 0.0}; }
  static StartSpec uniform_box(double lo, double hi) { return {Kind::UniformBox, Vector(), lo, hi}; }
};

/// Simulated Euler-Maruyama paths with their Brownian increments.
struct PathBatch {
  TimeGrid grid;
  StartSpec start;
  std::uint64_t seed = 0;
  /// Per path: n x (N+1) states.
  std::vector<Matrix> X;
  /// Per path: m x N controls applied on each interval.
  std::vector<Matrix> U;
  /// M x N Brownian increments.
  Matrix dW;

  std::size_t size() const { return X.size(); }
};

/// Brownian increments (M x N, variance dt) and start points of a batch.
/// Path j only depends on (seed, j).
struct NoiseDraw {
  Matrix dW;
  std::vector<Vector> starts;
};
NoiseDraw draw_noise(Eigen::Index n, std::size_t M, const TimeGrid& grid, std::uint64_t seed,
                     const StartSpec& start);

/// Euler-Maruyama under a feedback policy:
///   X_{i+1} = X_i + (A_i X_i + B_i u_i) dt + (C_i X_i + D_i u_i) dW_i,  u_i = policy(i, t_i, X_i).
/// Throws NumericError naming the path and node if |X| exceeds 1e10 or the
/// policy returns a non-finite control.
PathBatch simulate_paths(const Dynamics& dyn, const Policy& policy, std::size_t M, const TimeGrid& grid,
                         std::uint64_t seed, const StartSpec& start);

/// Same recursion driven by given increments and start points.
PathBatch simulate_with_noise(const Dynamics& dyn, const Policy& policy, const TimeGrid& grid,
                              const NoiseDraw& noise, std::uint64_t seed, const StartSpec& start);

}  // namespace ppgm::mc
