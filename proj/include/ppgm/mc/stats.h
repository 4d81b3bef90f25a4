#pragma once

#include <cstddef>
#include <span>

namespace ppgm::mc {

struct EstimateWithError {
  double mean = 0.0;
  double stdErr = 0.0;
  std::size_t M = 0;
};

/// Sum with a fixed pairwise reduction tree, independent of thread count.
double pairwise_sum(std::span<const double> xs);

/// Sample mean and standard error (sample variance with M - 1).
EstimateWithError summarize(std::span<const double> samples);

}  // namespace ppgm::mc
