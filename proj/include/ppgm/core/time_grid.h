#pragma once

#include <cstddef>

namespace ppgm {

/// Uniform partition 0 = t_0 < ... < t_N = T.
class TimeGrid {
 public:
  TimeGrid() : TimeGrid(1, 1.0) {}
  TimeGrid(std::size_t steps, double horizon);

  std::size_t steps() const { return steps_; }
  std::size_t nodes() const { return steps_ + 1; }
  double horizon() const { return horizon_; }
  double dt() const { return horizon_ / static_cast<double>(steps_); }

  /// Node time; t(N) is exactly T.
  double t(std::size_t i) const;

  /// Index of the interval [t_i, t_{i+1}) containing t, clamped to [0, N-1].
  std::size_t interval(double t) const;

  bool operator==(const TimeGrid&) const = default;

 private:
  std::size_t steps_;
  double horizon_;
};

}  // namespace ppgm
