#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace ppgm {

/// One row of convergence diagnostics. Quantities a method does not produce
/// stay NaN.
struct IterateRecord {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  std::size_t k = 0;
  double deltaK = kNaN;
  double controlErr = kNaN;
  double valueErr = kNaN;
  double contractionRatio = kNaN;
  double bsdeLoss = kNaN;
  double controlLoss = kNaN;
  double wallMillis = 0.0;
};

using IterateHistory = std::vector<IterateRecord>;

}  // namespace ppgm
