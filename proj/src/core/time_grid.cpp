#include "ppgm/core/time_grid.h"

#include <algorithm>
#include <cmath>

#include "ppgm/core/errors.h"

namespace ppgm {

TimeGrid::TimeGrid(std::size_t steps, double horizon) : steps_(steps), horizon_(horizon) {
  if (steps == 0) throw SpecError("TimeGrid: step count must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw SpecError("TimeGrid: horizon must be positive and finite");
  }
}

double TimeGrid::t(std::size_t i) const {
  if (i >= steps_) return horizon_;
  return horizon_ * static_cast<double>(i) / static_cast<double>(steps_);
}

std::size_t TimeGrid::interval(double t) const {
  // Small relative slack so that node times computed on a finer grid map
  // to the interval they start, not the previous one.
  const double pos = t / horizon_ * static_cast<double>(steps_) + 1e-9;
  if (!(pos > 0.0)) return 0;
  const auto idx = static_cast<std::size_t>(std::floor(pos));
  return std::min(idx, steps_ - 1);
}

}  // namespace ppgm
