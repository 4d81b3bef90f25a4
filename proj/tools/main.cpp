#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "ppgm/cli/builtins.h"
#include "ppgm/cli/experiment.h"
#include "ppgm/core/assumption.h"

namespace {

struct CommonFlags {
  std::string config;
  std::string problem;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string checkpoint;
  bool plots = false;
  bool timing = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON config file (or a summary.json of an earlier run)");
  cmd->add_option("--problem", f.problem, "builtin problem, overrides the config")
      ->check(CLI::IsMember(ppgm::cli::builtin_names()));
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_flag("--plots", f.plots, "also write SVG plots");
  cmd->add_flag("--timing", f.timing, "record wall-clock columns (makes CSVs run-dependent)");
}

ppgm::cli::ExperimentConfig resolve(const CommonFlags& f, ppgm::cli::Method method) {
  using namespace ppgm::cli;
  ExperimentConfig c = f.config.empty() ? default_config(f.problem.empty() ? "std-lq" : f.problem) : load_config(f.config);
  if (!f.problem.empty() && !f.config.empty()) {
    // Re-derive builtin defaults, then keep method settings from the file.
    const ExperimentConfig d = default_config(f.problem);
    c.problem = d.problem;
  }
  c.method = method;
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.outDir = f.out;
  if (!f.checkpoint.empty()) c.checkpoint = f.checkpoint;
  if (f.plots) c.plots = true;
  if (f.timing) c.timing = true;
  return c;
}

void print_check(const ppgm::cli::RunOutcome& outcome) {
  const auto& a = outcome.manifest["assumption"];
  std::cout << "problem: " << outcome.manifest["problem"].get<std::string>() << "\n"
            << "case:    " << a["case"].get<std::string>() << "\n"
            << "mu:      " << a["mu"].get<double>() << "\n"
            << "delta:   " << a["delta"].get<double>() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  using ppgm::cli::Method;
  CLI::App app{"Policy gradient solvers for stochastic linear-quadratic control"};
  app.require_subcommand(1);

  CommonFlags flags;
  const std::pair<const char*, Method> commands[] = {
      {"check", Method::Check},      {"riccati", Method::Riccati},          {"lq-pgm", Method::LqPgm},
      {"ppgm", Method::Ppgm},        {"cone-ref", Method::ConeReference},   {"evaluate", Method::Evaluate},
      {"sweep", Method::Sweep}};
  const char* help[] = {"report the convexity regime (mu, delta)",
                        "solve the Riccati equation",
                        "run the LQ policy gradient method",
                        "run the deep proximal policy gradient method",
                        "solve the cone-constrained reference ODE",
                        "evaluate a trained checkpoint or the reference policy",
                        "run a dimension or convexity sweep"};
  std::vector<std::pair<CLI::App*, Method>> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    CLI::App* cmd = app.add_subcommand(commands[i].first, help[i]);
    add_common(cmd, flags);
    if (commands[i].second == Method::Evaluate) {
      cmd->add_option("--checkpoint", flags.checkpoint, "checkpoint.json written by ppgm");
    }
    subs.emplace_back(cmd, commands[i].second);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (const auto& [cmd, method] : subs) {
      if (!cmd->parsed()) continue;
      const auto config = resolve(flags, method);
      const auto outcome = ppgm::cli::run_experiment(config);
      if (method == Method::Check) print_check(outcome);
      std::cerr << ppgm::cli::to_string(method) << ": " << outcome.manifest["verdict"].get<std::string>()
                << " (artifacts in " << config.outDir << ")\n";
      return outcome.converged ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
