#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ppgm/core/errors.h"
#include "ppgm/core/problem.h"
#include "ppgm/deep/ppgm.h"
#include "ppgm/lq/lq_pgm.h"

namespace ppgm::cli {

/// Invalid configuration; `path` locates the offending field, e.g.
/// "problem.inline.A".
class ConfigError : public SpecError {
 public:
  ConfigError(std::string path, const std::string& message)
      : SpecError(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

nlohmann::json spec_to_json(const LQSpec& spec);
/// Parses an inline spec. Matrices are arrays of rows; a time-varying
/// coefficient is {"steps": N, "values": [matrix per node]}. Normalizes the
/// spec and validates it.
LQSpec spec_from_json(const nlohmann::json& j, const std::string& path = "spec");

enum class Method { Check, Riccati, LqPgm, Ppgm, ConeReference, Evaluate, Sweep };
const char* to_string(Method m);
Method method_from_string(const std::string& s);

struct ProblemSource {
  enum class Kind { Builtin, Inline, Random } kind = Kind::Builtin;
  std::string builtin = "std-lq";
  LQSpec spec;
  Eigen::Index randomN = 0;
  std::uint64_t randomSeed = 0;
};

struct EvaluationConfig {
  std::size_t timeSteps = 100;
  std::size_t paths = 10000;
  /// value0 grid: the first coordinate of x0 varied over [xLo, xHi].
  std::size_t xPoints = 21;
  double xLo = -10.0;
  double xHi = 10.0;
  /// Paths of the periodic value-error estimate during deep training.
  std::size_t monitorPaths = 1000;
  std::size_t monitorEvery = 10;
};

struct SweepConfig {
  enum class Kind { Dimension, Convexity } kind = Kind::Dimension;
  /// Dimensions n, or convexity levels r with R = r I.
  std::vector<double> values{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  std::size_t repeats = 5;
  /// Dimension of the convexity sweep.
  Eigen::Index convexityDim = 5;
  /// Compute the Riccati reference for error columns.
  bool withReference = true;
};

struct ExperimentConfig {
  ProblemSource problem;
  Method method = Method::LqPgm;
  std::uint64_t seed = 0;
  lq::LqPgmOptions lqPgm;
  deep::PpgmConfig ppgm;
  EvaluationConfig eval;
  SweepConfig sweep;
  std::string outDir = "out";
  /// Checkpoint consumed by the evaluate method.
  std::string checkpoint;
  bool plots = false;
  bool timing = false;
};

/// Library defaults adjusted per builtin: the deep method uses tau = 0.1 on
/// cosine-cost, and the singular example gets reduced sub-steps, smaller
/// rates, M = 100 and up to 500 outer iterations.
ExperimentConfig default_config(const std::string& builtin = "std-lq");

/// Parses a config file body. Accepts either a config object or a run
/// manifest, whose "config" member is used. Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
/// Fully resolved config; config_from_json(config_to_json(c)) reproduces c.
nlohmann::json config_to_json(const ExperimentConfig& c);

/// Problem named by the source, as a general problem.
GeneralProblem resolve_problem(const ProblemSource& src);
/// LQ data of the source; throws ConfigError for non-LQ builtins.
LQSpec resolve_lq(const ProblemSource& src);
bool is_lq(const ProblemSource& src);
std::string problem_label(const ProblemSource& src);

}  // namespace ppgm::cli
