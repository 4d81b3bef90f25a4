#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ppgm/cli/config.h"
#include "ppgm/cli/output.h"

namespace ppgm::cli {

/// Known solution used to score a run: the value at time 0 and the optimal
/// feedback. Available for unconstrained LQ problems (Riccati), the scalar
/// cone problem (cone reference) and the cosine-cost problem.
struct Reference {
  std::function<double(const Vector& x)> value0;
  std::function<Vector(double t, const Vector& x)> control;
  std::string source;

  explicit operator bool() const { return static_cast<bool>(value0); }
};
Reference make_reference(const ExperimentConfig& config, const GeneralProblem& prob);

/// Start points of the value0 grid: x0 with its first coordinate varied.
std::vector<Vector> value0_points(const Vector& x0, const EvaluationConfig& eval);

/// Monte Carlo value0 curve of a policy, with the reference column filled
/// when one exists.
std::vector<Value0Row> estimate_value0(const GeneralProblem& prob, const mc::Policy& policy,
                                       const EvaluationConfig& eval, std::uint64_t seed, const Reference& ref);

/// max |value - reference| / max |reference| over a value0 curve.
double value0_error(const std::vector<Value0Row>& rows);

struct RunOutcome {
  /// False when an iterative method stopped at its iteration cap.
  bool converged = true;
  nlohmann::json manifest;
};

/// Runs the configured method and writes its artifacts under outDir:
/// history.csv, value0.csv and summary.json, plus method-specific files and,
/// with plots, SVG line plots. Throws ConfigError when the method does not
/// fit the problem.
RunOutcome run_experiment(const ExperimentConfig& config);

struct SweepCell {
  double value = 0.0;
  std::size_t repeat = 0;
  /// ok, max_iter, failed, or no_optimum when the reference Riccati
  /// equation escapes (LQ-PGM still runs; errors are infinite).
  std::string status = "ok";
  std::string error;
  std::size_t iterations = 0;
  double deltaK = IterateRecord::kNaN;
  double controlErr = IterateRecord::kNaN;
  double valueErr = IterateRecord::kNaN;
  double runtimeSec = 0.0;
};

/// Runs LQ-PGM over random specs. Dimension sweeps vary n = m; convexity
/// sweeps fix n = m = convexityDim and set R = r I. A failing cell is
/// recorded with status failed and infinite errors; the sweep continues.
std::vector<SweepCell> sensitivity_sweep(const SweepConfig& sweep, const lq::LqPgmOptions& options,
                                         std::uint64_t seed, bool timing);
void write_sweep(const std::string& path, const SweepConfig& sweep, const std::vector<SweepCell>& cells);
/// Per-value means over repeats that did not fail.
void write_sweep_means(const std::string& path, const SweepConfig& sweep, const std::vector<SweepCell>& cells);

}  // namespace ppgm::cli
