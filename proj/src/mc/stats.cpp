#include "ppgm/mc/stats.h"

#include <cmath>
#include <vector>

namespace ppgm::mc {

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

EstimateWithError summarize(std::span<const double> samples) {
  EstimateWithError e;
  e.M = samples.size();
  if (samples.empty()) return e;
  const double n = static_cast<double>(samples.size());
  e.mean = pairwise_sum(samples) / n;
  if (samples.size() < 2) return e;
  std::vector<double> sq(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = samples[i] - e.mean;
    sq[i] = d * d;
  }
  e.stdErr = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  return e;
}

}  // namespace ppgm::mc
