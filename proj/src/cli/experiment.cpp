#include "ppgm/cli/experiment.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>

#include "ppgm/cli/builtins.h"
#include "ppgm/core/assumption.h"
#include "ppgm/mc/estimators.h"
#include "ppgm/mc/parallel.h"
#include "ppgm/mc/random.h"
#include "ppgm/ode/cone.h"
#include "ppgm/version.h"

namespace ppgm::cli {

using nlohmann::json;

namespace {

constexpr std::uint64_t kEvalTag = 0xe7a1;

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

bool is_cone_reference_problem(const GeneralProblem& prob) {
  return prob.dyn.n == 1 && prob.dyn.constraint.is_positive_cone();
}

json report_json(const AssumptionReport& r) {
  return json{{"case", std::string(to_string(r.caseKind))},
              {"mu", r.mu},
              {"delta", r.delta},
              {"coupling_vanishes", r.couplingVanishes}};
}

AssumptionReport assumption_of(const ExperimentConfig& c, const GeneralProblem& prob) {
  if (is_lq(c.problem)) return assumption_check(resolve_lq(c.problem));
  // cosine-cost: terminal cost |x|^2 / 2 is 1-strongly convex.
  return singular_check(prob.dyn, 1.0);
}

double relative_sup(const std::vector<double>& est, const std::vector<double>& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    num = std::max(num, std::abs(est[i] - ref[i]));
    den = std::max(den, std::abs(ref[i]));
  }
  return den > 0.0 ? num / den : num;
}

void require_free_lq(const ExperimentConfig& c, const char* method) {
  if (!is_lq(c.problem)) throw ConfigError("method", std::string(method) + " needs an LQ problem");
  if (!resolve_lq(c.problem).dyn.constraint.is_free()) {
    throw ConfigError("method", std::string(method) + " handles unconstrained problems only; use ppgm");
  }
}

std::vector<Value0Row> exact_value0(const Vector& x0, const EvaluationConfig& eval, const Reference& ref,
                                    const std::function<double(const Vector&)>& value) {
  std::vector<Value0Row> rows;
  for (const Vector& x : value0_points(x0, eval)) rows.push_back({x[0], value(x), 0.0, ref ? ref.value0(x) : NAN});
  return rows;
}

void plot_value0(const std::string& dir, const std::vector<Value0Row>& rows, const std::string& label) {
  PlotSeries est{label, {}, {}}, ref{"reference", {}, {}};
  for (const auto& r : rows) {
    est.x.push_back(r.x);
    est.y.push_back(r.value);
    ref.x.push_back(r.x);
    ref.y.push_back(r.reference);
  }
  write_line_plot(join(dir, "value0.svg"), "Value at time 0", "x", {est, ref}, false);
}

void plot_history(const std::string& dir, const IterateHistory& h) {
  PlotSeries d{"delta_k", {}, {}}, ce{"control_err", {}, {}}, ve{"value_err", {}, {}}, bl{"bsde_loss", {}, {}},
      cl{"control_loss", {}, {}};
  for (const auto& r : h) {
    const double k = static_cast<double>(r.k);
    for (auto* s : {&d, &ce, &ve, &bl, &cl}) s->x.push_back(k);
    d.y.push_back(r.deltaK);
    ce.y.push_back(r.controlErr);
    ve.y.push_back(r.valueErr);
    bl.y.push_back(r.bsdeLoss);
    cl.y.push_back(r.controlLoss);
  }
  std::vector<PlotSeries> series;
  for (auto* s : {&d, &ce, &ve, &bl, &cl}) {
    if (std::any_of(s->y.begin(), s->y.end(), [](double v) { return std::isfinite(v) && v > 0.0; })) series.push_back(*s);
  }
  write_line_plot(join(dir, "convergence.svg"), "Convergence", "iteration", series, true);
}

json history_tail(const IterateHistory& h) {
  if (h.empty()) return json{{"iterations", 0}};
  const auto& r = h.back();
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return json{{"iterations", r.k},
              {"final_delta_k", num(r.deltaK)},
              {"final_control_err", num(r.controlErr)},
              {"final_value_err", num(r.valueErr)},
              {"final_bsde_loss", num(r.bsdeLoss)},
              {"final_control_loss", num(r.controlLoss)}};
}

json checkpoint_json(const deep::DeepState& s) {
  return json{{"k", s.k}, {"phi", mlp_to_json(s.phiNet)}, {"z", mlp_to_json(s.zNet)}, {"y", mlp_to_json(s.yNet)}};
}

deep::DeepState checkpoint_from_json(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("phi") || !j.contains("z") || !j.contains("y")) {
    throw ConfigError(path, "checkpoint needs phi, z and y networks");
  }
  deep::DeepState s;
  s.phiNet = mlp_from_json(j["phi"], path + ".phi");
  s.zNet = mlp_from_json(j["z"], path + ".z");
  s.yNet = mlp_from_json(j["y"], path + ".y");
  s.k = j.value("k", std::size_t{0});
  return s;
}

}  // namespace

std::vector<Vector> value0_points(const Vector& x0, const EvaluationConfig& eval) {
  std::vector<Vector> out;
  for (std::size_t q = 0; q < eval.xPoints; ++q) {
    Vector x = x0;
    x[0] = eval.xPoints == 1 ? eval.xLo
                             : eval.xLo + (eval.xHi - eval.xLo) * static_cast<double>(q) /
                                              static_cast<double>(eval.xPoints - 1);
    out.push_back(std::move(x));
  }
  return out;
}

double value0_error(const std::vector<Value0Row>& rows) {
  std::vector<double> est, ref;
  for (const auto& r : rows) {
    est.push_back(r.value);
    ref.push_back(r.reference);
  }
  return relative_sup(est, ref);
}

Reference make_reference(const ExperimentConfig& config, const GeneralProblem& prob) {
  Reference ref;
  const TimeGrid grid(config.eval.timeSteps, prob.dyn.T);
  if (config.problem.kind == ProblemSource::Kind::Builtin && config.problem.builtin == "cosine-cost") {
    // u = 0 is optimal and E|X_T|^2 = |x|^2 under it.
    const double m = static_cast<double>(prob.dyn.m);
    const double T = prob.dyn.T;
    ref.value0 = [m, T](const Vector& x) { return -m * T + 0.5 * x.squaredNorm(); };
    const Eigen::Index dim = prob.dyn.m;
    ref.control = [dim](double, const Vector&) { return Vector(Vector::Zero(dim)); };
    ref.source = "zero control";
    return ref;
  }
  if (!is_lq(config.problem)) return ref;
  const LQSpec spec = resolve_lq(config.problem);
  if (spec.dyn.constraint.is_free()) {
    auto sol = std::make_shared<ode::RiccatiSolution>(ode::solve_riccati(spec, grid));
    ref.value0 = [sol](const Vector& x) { return 0.5 * x.dot(sol->valueCoeff.at_node(0) * x); };
    ref.control = [sol](double t, const Vector& x) { return Vector(sol->alphaStar.at(t) * x); };
    ref.source = "riccati";
  } else if (is_cone_reference_problem(prob)) {
    auto cone = std::make_shared<ode::ConeReference>(ode::solve_cone_reference(spec, grid));
    ref.value0 = [cone](const Vector& x) { return cone->value(0, x[0]); };
    ref.control = [cone](double t, const Vector& x) { return cone->control(cone->grid.interval(t), x[0]); };
    ref.source = "cone";
  }
  return ref;
}

std::vector<Value0Row> estimate_value0(const GeneralProblem& prob, const mc::Policy& policy,
                                       const EvaluationConfig& eval, std::uint64_t seed, const Reference& ref) {
  const TimeGrid grid(eval.timeSteps, prob.dyn.T);
  std::vector<Value0Row> rows;
  for (const Vector& x : value0_points(prob.dyn.x0, eval)) {
    const auto e = mc::estimate_cost(prob, policy, eval.paths, grid, seed, mc::StartSpec::fixed(x));
    rows.push_back({x[0], e.mean, e.stdErr, ref ? ref.value0(x) : NAN});
  }
  return rows;
}

namespace {

deep::Monitor make_monitor(const GeneralProblem& prob, const ExperimentConfig& c, const Reference& ref,
                           std::uint64_t seed) {
  if (!ref) return {};
  // Probe set: training nodes times the value0 line.
  const TimeGrid train(c.ppgm.timeSteps, prob.dyn.T);
  std::vector<double> times;
  for (std::size_t i = 0; i < train.steps(); ++i) times.push_back(train.t(i));
  const std::vector<Vector> xs = value0_points(prob.dyn.x0, c.eval);
  Matrix refU(prob.dyn.m, static_cast<Eigen::Index>(times.size() * xs.size()));
  Eigen::Index col = 0;
  for (double t : times) {
    for (const Vector& x : xs) refU.col(col++) = ref.control(t, x);
  }
  const double refNorm = refU.cwiseAbs().maxCoeff();
  EvaluationConfig monitorEval = c.eval;
  monitorEval.paths = c.eval.monitorPaths;

  return [=, &prob](const deep::DeepState& s, IterateRecord& row) {
    const mc::Policy policy = deep::network_policy(s.phiNet, prob.dyn.constraint);
    Matrix U(prob.dyn.m, refU.cols());
    Eigen::Index k = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      for (const Vector& x : xs) U.col(k++) = policy(i, times[i], x);
    }
    const double diff = (U - refU).cwiseAbs().maxCoeff();
    row.controlErr = refNorm > 0.0 ? diff / refNorm : diff;
    if (c.eval.monitorEvery > 0 && s.k % c.eval.monitorEvery == 0) {
      row.valueErr = value0_error(estimate_value0(prob, policy, monitorEval, seed, ref));
    }
  };
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(config.outDir);
  const std::string& dir = config.outDir;
  const std::uint64_t evalSeed = mc::child_seed(config.seed, kEvalTag);

  RunOutcome out;
  json result;
  json& m = out.manifest;
  m["manifest_version"] = 1;
  m["code_version"] = kVersion;
  m["config"] = config_to_json(config);
  m["seeds"] = {{"master", config.seed}, {"evaluation", evalSeed}};

  if (config.method == Method::Sweep) {
    lq::LqPgmOptions opts = config.lqPgm;
    opts.seed = config.seed;
    const auto cells = sensitivity_sweep(config.sweep, opts, config.seed, config.timing);
    write_sweep(join(dir, "sweep.csv"), config.sweep, cells);
    write_sweep_means(join(dir, "sweep_mean.csv"), config.sweep, cells);
    std::size_t failed = 0;
    for (const auto& c : cells) failed += c.status == "failed";
    result = {{"cells", cells.size()}, {"failed_cells", failed}};
    if (config.plots) {
      std::map<double, std::vector<const SweepCell*>> byValue;
      for (const auto& c : cells) byValue[c.value].push_back(&c);
      PlotSeries err{"value_err", {}, {}}, rt{"runtime_s", {}, {}};
      for (const auto& [v, group] : byValue) {
        double e = 0.0, r = 0.0;
        for (const auto* c : group) {
          e += c->valueErr;
          r += c->runtimeSec;
        }
        err.x.push_back(v);
        err.y.push_back(e / static_cast<double>(group.size()));
        rt.x.push_back(v);
        rt.y.push_back(r / static_cast<double>(group.size()));
      }
      const bool dimension = config.sweep.kind == SweepConfig::Kind::Dimension;
      write_line_plot(join(dir, "sweep.svg"), dimension ? "Dimension sweep" : "Convexity sweep",
                      dimension ? "n" : "r", config.timing ? std::vector<PlotSeries>{err, rt} : std::vector<PlotSeries>{err},
                      true);
    }
  } else {
    const GeneralProblem prob = resolve_problem(config.problem);
    const AssumptionReport report = assumption_of(config, prob);
    m["problem"] = problem_label(config.problem);
    m["assumption"] = report_json(report);
    if (report.caseKind == CaseKind::NotSatisfied) {
      std::cerr << "warning: convexity assumption not satisfied (mu = " << report.mu << ")\n";
    }

    switch (config.method) {
      case Method::Check:
        write_json(join(dir, "check.json"), report_json(report));
        break;

      case Method::Riccati: {
        require_free_lq(config, "riccati");
        const LQSpec spec = resolve_lq(config.problem);
        const TimeGrid grid(config.eval.timeSteps, spec.dyn.T);
        const auto sol = ode::solve_riccati(spec, grid);
        std::vector<std::string> header{"t"};
        for (Eigen::Index c = 0; c < spec.dyn.n; ++c)
          for (Eigen::Index r = 0; r < spec.dyn.n; ++r) header.push_back("a_" + std::to_string(r) + "_" + std::to_string(c));
        for (Eigen::Index c = 0; c < spec.dyn.n; ++c)
          for (Eigen::Index r = 0; r < spec.dyn.m; ++r)
            header.push_back("alpha_" + std::to_string(r) + "_" + std::to_string(c));
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < grid.nodes(); ++i) {
          std::vector<std::string> row{format_number(grid.t(i))};
          const Matrix& a = sol.aStar.at_node(i);
          const Matrix& al = sol.alphaStar.node(i);
          for (Eigen::Index k = 0; k < a.size(); ++k) row.push_back(format_number(a.data()[k]));
          for (Eigen::Index k = 0; k < al.size(); ++k) row.push_back(format_number(al.data()[k]));
          rows.push_back(std::move(row));
        }
        write_csv(join(dir, "riccati.csv"), header, rows);
        const Reference ref = make_reference(config, prob);
        const auto v0 = exact_value0(spec.dyn.x0, config.eval, ref, ref.value0);
        write_value0(join(dir, "value0.csv"), v0);
        if (config.plots) plot_value0(dir, v0, "riccati");
        result = {{"value_at_x0", ref.value0(spec.dyn.x0)}};
        break;
      }

      case Method::ConeReference: {
        if (!is_lq(config.problem) || !is_cone_reference_problem(prob)) {
          throw ConfigError("method", "cone-ref needs a scalar-state LQ problem with positive_cone controls");
        }
        const LQSpec spec = resolve_lq(config.problem);
        const TimeGrid grid(config.eval.timeSteps, spec.dyn.T);
        const auto cone = ode::solve_cone_reference(spec, grid);
        std::vector<std::string> header{"t", "p_plus", "p_minus"};
        for (Eigen::Index k = 0; k < spec.dyn.m; ++k) header.push_back("xi_plus_" + std::to_string(k));
        for (Eigen::Index k = 0; k < spec.dyn.m; ++k) header.push_back("xi_minus_" + std::to_string(k));
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < grid.nodes(); ++i) {
          std::vector<std::string> row{format_number(grid.t(i)), format_number(cone.Pplus[i]),
                                       format_number(cone.Pminus[i])};
          for (Eigen::Index k = 0; k < spec.dyn.m; ++k) row.push_back(format_number(cone.xiPlus[i][k]));
          for (Eigen::Index k = 0; k < spec.dyn.m; ++k) row.push_back(format_number(cone.xiMinus[i][k]));
          rows.push_back(std::move(row));
        }
        write_csv(join(dir, "cone.csv"), header, rows);
        const Reference ref = make_reference(config, prob);
        const auto v0 = exact_value0(spec.dyn.x0, config.eval, ref, ref.value0);
        write_value0(join(dir, "value0.csv"), v0);
        if (config.plots) plot_value0(dir, v0, "cone reference");
        result = {{"p_plus_0", cone.Pplus[0]}, {"p_minus_0", cone.Pminus[0]}};
        break;
      }

      case Method::LqPgm: {
        require_free_lq(config, "lq-pgm");
        const LQSpec spec = resolve_lq(config.problem);
        lq::LqPgmOptions opts = config.lqPgm;
        opts.seed = config.seed;
        opts.recordTiming = config.timing;
        const auto ref = ode::solve_riccati(spec, TimeGrid(opts.timeSteps, spec.dyn.T));
        const auto res = lq::run_lq_pgm(spec, std::nullopt, opts, &ref);
        write_history(join(dir, "history.csv"), res.history);
        const Matrix P = ode::solve_cost_lyapunov(spec, res.alpha).at_node(0);
        const Reference rv = make_reference(config, prob);
        const auto v0 = exact_value0(spec.dyn.x0, config.eval, rv, [&](const Vector& x) { return 0.5 * x.dot(P * x); });
        write_value0(join(dir, "value0.csv"), v0);
        if (config.plots) {
          plot_history(dir, res.history);
          plot_value0(dir, v0, "lq-pgm");
        }
        out.converged = res.converged;
        result = history_tail(res.history);
        result["converged"] = res.converged;
        result["value0_rel_sup_err"] = value0_error(v0);
        break;
      }

      case Method::Ppgm: {
        deep::PpgmConfig pc = config.ppgm;
        pc.seed = config.seed;
        const Reference ref = make_reference(config, prob);
        const auto res = deep::run_ppgm(prob, pc, make_monitor(prob, config, ref, mc::child_seed(evalSeed, 1)),
                                        std::nullopt, config.timing);
        write_history(join(dir, "history.csv"), res.history);
        write_json(join(dir, "checkpoint.json"), checkpoint_json(res.state));
        const mc::Policy policy = deep::network_policy(res.state.phiNet, prob.dyn.constraint);
        const auto v0 = estimate_value0(prob, policy, config.eval, evalSeed, ref);
        write_value0(join(dir, "value0.csv"), v0);
        if (config.plots) {
          plot_history(dir, res.history);
          plot_value0(dir, v0, "ppgm");
        }
        out.converged = res.converged;
        result = history_tail(res.history);
        result["converged"] = res.converged;
        result["optimizer"] = nn::to_string(pc.optimizer);
        result["tau"] = pc.tau;
        if (ref) result["value0_rel_sup_err"] = value0_error(v0);
        break;
      }

      case Method::Evaluate: {
        const Reference ref = make_reference(config, prob);
        mc::Policy policy;
        std::string source;
        const std::string ckpt = config.checkpoint.empty() ? join(dir, "checkpoint.json") : config.checkpoint;
        if (std::filesystem::exists(ckpt)) {
          const deep::DeepState s = checkpoint_from_json(read_json(ckpt), ckpt);
          if (s.phiNet.input_dim() != prob.dyn.n + 1 || s.phiNet.output_dim() != prob.dyn.m) {
            throw ConfigError(ckpt, "checkpoint network does not match the problem dimensions");
          }
          policy = deep::network_policy(s.phiNet, prob.dyn.constraint);
          source = ckpt;
        } else if (ref) {
          const auto control = ref.control;
          policy = mc::Policy([control](std::size_t, double t, const Vector& x) { return control(t, x); });
          source = ref.source;
        } else {
          throw ConfigError("checkpoint", "no checkpoint at " + ckpt + " and no reference policy for this problem");
        }
        const auto v0 = estimate_value0(prob, policy, config.eval, evalSeed, ref);
        write_value0(join(dir, "value0.csv"), v0);
        const TimeGrid grid(config.eval.timeSteps, prob.dyn.T);
        const auto cost = mc::estimate_cost(prob, policy, config.eval.paths, grid, evalSeed);
        const auto h2 = mc::estimate_h2_norm(prob.dyn, policy, config.eval.paths, grid, evalSeed,
                                             mc::StartSpec::fixed(prob.dyn.x0));
        if (config.plots) plot_value0(dir, v0, "evaluated policy");
        result = {{"policy", source},
                  {"cost_at_x0", cost.mean},
                  {"cost_stderr", cost.stdErr},
                  {"h2_norm_at_x0", std::sqrt(h2.mean)}};
        if (ref) result["value0_rel_sup_err"] = value0_error(v0);
        break;
      }

      case Method::Sweep:
        break;
    }
  }

  m["result"] = result;
  const bool iterative = config.method == Method::LqPgm || config.method == Method::Ppgm;
  m["verdict"] = !iterative ? "completed" : out.converged ? "converged" : "max_iterations";
  m["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_json(join(dir, "summary.json"), m);
  return out;
}

std::vector<SweepCell> sensitivity_sweep(const SweepConfig& sweep, const lq::LqPgmOptions& options,
                                         std::uint64_t seed, bool timing) {
  std::vector<SweepCell> cells;
  for (std::size_t v = 0; v < sweep.values.size(); ++v) {
    for (std::size_t r = 0; r < sweep.repeats; ++r) {
      SweepCell cell;
      cell.value = sweep.values[v];
      cell.repeat = r;
      cells.push_back(cell);
    }
  }
  const bool dimension = sweep.kind == SweepConfig::Kind::Dimension;
  mc::parallel_for(
      cells.size(),
      [&](std::size_t idx) {
        SweepCell& cell = cells[idx];
        // Convexity cells of one repeat share the base spec so only r changes.
        const std::uint64_t base = dimension ? mc::child_seed(seed, static_cast<std::uint64_t>(cell.value)) : seed;
        const std::uint64_t cellSeed = mc::child_seed(base, cell.repeat);
        try {
          const Eigen::Index n = dimension ? static_cast<Eigen::Index>(cell.value) : sweep.convexityDim;
          LQSpec spec = generate_random_spec(n, cellSeed);
          if (!dimension) spec.R = CoefficientPath::constant(cell.value * Matrix::Identity(n, n), spec.dyn.T);
          lq::LqPgmOptions opts = options;
          opts.seed = cellSeed;
          opts.recordTiming = false;
          std::optional<ode::RiccatiSolution> ref;
          std::string refError;
          if (sweep.withReference) {
            try {
              ref = ode::solve_riccati(spec, TimeGrid(opts.timeSteps, spec.dyn.T));
            } catch (const NumericError& e) {
              // Riccati escape: the value is unbounded below, so any policy is infinitely suboptimal.
              refError = e.what();
            }
          }
          const auto start = std::chrono::steady_clock::now();
          try {
            const auto res = lq::run_lq_pgm(spec, std::nullopt, opts, ref ? &*ref : nullptr);
            cell.iterations = res.history.size();
            cell.status = res.converged ? "ok" : "max_iter";
            if (!res.history.empty()) {
              cell.deltaK = res.history.back().deltaK;
              cell.controlErr = res.history.back().controlErr;
              cell.valueErr = res.history.back().valueErr;
            }
          } catch (const std::exception& e) {
            if (refError.empty()) throw;
            // Divergence is the expected outcome when the cost is unbounded below.
            refError += "; " + std::string(e.what());
          }
          if (timing) cell.runtimeSec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          if (!refError.empty()) {
            cell.status = "no_optimum";
            cell.error = refError;
            cell.controlErr = INFINITY;
            cell.valueErr = INFINITY;
          }
        } catch (const std::exception& e) {
          cell.status = "failed";
          cell.error = e.what();
          cell.controlErr = INFINITY;
          cell.valueErr = INFINITY;
        }
      },
      1);
  return cells;
}

namespace {

std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
  }
  return s;
}

const char* sweep_kind(const SweepConfig& s) {
  return s.kind == SweepConfig::Kind::Dimension ? "dimension" : "convexity-r";
}

}  // namespace

void write_sweep(const std::string& path, const SweepConfig& sweep, const std::vector<SweepCell>& cells) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : cells) {
    rows.push_back({sweep_kind(sweep), format_number(c.value), std::to_string(c.repeat), c.status,
                    std::to_string(c.iterations), format_number(c.deltaK), format_number(c.controlErr),
                    format_number(c.valueErr), format_number(c.runtimeSec), sanitize(c.error)});
  }
  write_csv(path,
            {"kind", "value", "repeat", "status", "iterations", "delta_k", "control_err", "value_err", "runtime_s",
             "error"},
            rows);
}

void write_sweep_means(const std::string& path, const SweepConfig& sweep, const std::vector<SweepCell>& cells) {
  std::vector<std::vector<std::string>> rows;
  for (double v : sweep.values) {
    std::size_t ok = 0, total = 0;
    double it = 0, ce = 0, ve = 0, rt = 0;
    for (const auto& c : cells) {
      if (c.value != v) continue;
      ++total;
      if (c.status == "failed" || c.status == "no_optimum") continue;
      ++ok;
      it += static_cast<double>(c.iterations);
      ce += c.controlErr;
      ve += c.valueErr;
      rt += c.runtimeSec;
    }
    const double d = static_cast<double>(ok);
    auto mean = [&](double s) { return ok ? format_number(s / d) : format_number(INFINITY); };
    rows.push_back({sweep_kind(sweep), format_number(v), std::to_string(ok), std::to_string(total), mean(it), mean(ce),
                    mean(ve), mean(rt)});
  }
  write_csv(path, {"kind", "value", "ok_cells", "cells", "iterations", "control_err", "value_err", "runtime_s"}, rows);
}

}  // namespace ppgm::cli
