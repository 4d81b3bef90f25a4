#include "ppgm/cli/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "ppgm/cli/builtins.h"

namespace ppgm::cli {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(path, "expected a non-negative integer");
  return j.get<std::size_t>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

std::uint64_t seed_of(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    throw ConfigError(path, "expected a non-negative integer seed");
  }
  return j.get<std::uint64_t>();
}

Vector vector_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Matrix matrix_from_json(const json& j, const std::string& path) {
  if (j.is_number()) {
    Matrix m(1, 1);
    m(0, 0) = j.get<double>();
    return m;
  }
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array()) throw ConfigError(path + "[" + std::to_string(r) + "]", "expected a row array");
    if (r == 0) cols = j[r].size();
    if (j[r].size() != cols || cols == 0) throw ConfigError(path + "[" + std::to_string(r) + "]", "rows must have equal, nonzero length");
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          number(j[r][c], path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

json path_to_json(const CoefficientPath& p) {
  if (p.is_constant()) return matrix_to_json(p.node(0));
  json values = json::array();
  for (const auto& m : p.values()) values.push_back(matrix_to_json(m));
  return json{{"steps", p.grid().steps()}, {"values", std::move(values)}};
}

CoefficientPath path_from_json(const json& j, double T, const std::string& path) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (k != "steps" && k != "values") throw ConfigError(path + "." + k, "unknown key");
    }
    if (!j.contains("steps") || !j.contains("values")) throw ConfigError(path, "time-varying coefficient needs steps and values");
    const std::size_t steps = count(j["steps"], path + ".steps");
    if (steps < 1) throw ConfigError(path + ".steps", "must be at least 1");
    const json& values = j["values"];
    if (!values.is_array() || values.size() != steps + 1) {
      throw ConfigError(path + ".values", "expected steps + 1 matrices");
    }
    std::vector<Matrix> nodes;
    for (std::size_t i = 0; i < values.size(); ++i) {
      nodes.push_back(matrix_from_json(values[i], path + ".values[" + std::to_string(i) + "]"));
    }
    try {
      return CoefficientPath(TimeGrid(steps, T), std::move(nodes));
    } catch (const SpecError& e) {
      throw ConfigError(path, e.what());
    }
  }
  return CoefficientPath::constant(matrix_from_json(j, path), T);
}

/// Object reader that rejects keys nobody asked for.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "(root)" : path_, "expected an object");
  }
  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const json& need(const std::string& key) {
    const json* v = get(key);
    if (!v) throw ConfigError(at(key), "missing required field");
    return *v;
  }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError(at(k), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json constraint_to_json(const ConstraintSet& c) {
  if (c.is_positive_cone()) return json{{"kind", "positive_cone"}};
  if (c.is_box()) return json{{"kind", "box"}, {"lo", vector_to_json(c.as_box().lo)}, {"hi", vector_to_json(c.as_box().hi)}};
  return json{{"kind", "free"}};
}

ConstraintSet constraint_from_json(const json& j, const std::string& path) {
  Fields f(j, path);
  const std::string kind = text(f.need("kind"), f.at("kind"));
  ConstraintSet out;
  if (kind == "free") {
    out = ConstraintSet::free();
  } else if (kind == "positive_cone") {
    out = ConstraintSet::positive_cone();
  } else if (kind == "box") {
    try {
      out = ConstraintSet::box(vector_from_json(f.need("lo"), f.at("lo")), vector_from_json(f.need("hi"), f.at("hi")));
    } catch (const ConfigError&) {
      throw;
    } catch (const SpecError& e) {
      throw ConfigError(path, e.what());
    }
  } else {
    throw ConfigError(f.at("kind"), "expected free, positive_cone or box");
  }
  f.finish();
  return out;
}

const char* const kMethodNames[] = {"check", "riccati", "lq-pgm", "ppgm", "cone-ref", "evaluate", "sweep"};

}  // namespace

json spec_to_json(const LQSpec& s) {
  return json{{"n", s.dyn.n},
              {"m", s.dyn.m},
              {"T", s.dyn.T},
              {"x0", vector_to_json(s.dyn.x0)},
              {"A", path_to_json(s.dyn.A)},
              {"B", path_to_json(s.dyn.B)},
              {"C", path_to_json(s.dyn.C)},
              {"D", path_to_json(s.dyn.D)},
              {"Q", path_to_json(s.Q)},
              {"R", path_to_json(s.R)},
              {"S", path_to_json(s.S)},
              {"G", matrix_to_json(s.G)},
              {"constraint", constraint_to_json(s.dyn.constraint)}};
}

LQSpec spec_from_json(const json& j, const std::string& path) {
  Fields f(j, path);
  LQSpec s;
  s.dyn.n = static_cast<Eigen::Index>(count(f.need("n"), f.at("n")));
  s.dyn.m = static_cast<Eigen::Index>(count(f.need("m"), f.at("m")));
  s.dyn.T = number(f.need("T"), f.at("T"));
  if (!(s.dyn.T > 0.0)) throw ConfigError(f.at("T"), "horizon must be positive");
  const double T = s.dyn.T;
  s.dyn.A = path_from_json(f.need("A"), T, f.at("A"));
  s.dyn.B = path_from_json(f.need("B"), T, f.at("B"));
  s.dyn.C = path_from_json(f.need("C"), T, f.at("C"));
  s.dyn.D = path_from_json(f.need("D"), T, f.at("D"));
  s.Q = path_from_json(f.need("Q"), T, f.at("Q"));
  s.R = path_from_json(f.need("R"), T, f.at("R"));
  s.S = path_from_json(f.need("S"), T, f.at("S"));
  s.G = matrix_from_json(f.need("G"), f.at("G"));
  s.dyn.x0 = f.get("x0") ? vector_from_json(*f.get("x0"), f.at("x0")) : Vector::Ones(s.dyn.n);
  s.dyn.constraint = f.get("constraint") ? constraint_from_json(*f.get("constraint"), f.at("constraint")) : ConstraintSet::free();
  f.finish();
  try {
    s.normalize();
    s.validate();
  } catch (const SpecError& e) {
    throw ConfigError(path, e.what());
  }
  return s;
}

const char* to_string(Method m) { return kMethodNames[static_cast<int>(m)]; }

Method method_from_string(const std::string& s) {
  for (int i = 0; i < 7; ++i) {
    if (s == kMethodNames[i]) return static_cast<Method>(i);
  }
  throw ConfigError("method", "unknown method '" + s + "'");
}

ExperimentConfig default_config(const std::string& builtin) {
  ExperimentConfig c;
  c.problem.kind = ProblemSource::Kind::Builtin;
  c.problem.builtin = builtin;
  if (builtin == "cosine-cost") c.ppgm.tau = 0.1;
  if (builtin == "singular-lq") {
    c.ppgm.bsdeSteps = 10;
    c.ppgm.controlSteps = 10;
    c.ppgm.controlRate = 0.002;
    c.ppgm.bsdeRate = 0.005;
    c.ppgm.batch = 100;
    c.ppgm.outerMax = 500;
  }
  return c;
}

ExperimentConfig config_from_json(const json& root) {
  if (root.is_object() && root.contains("config") && root.contains("manifest_version")) {
    return config_from_json(root["config"]);
  }
  Fields top(root, "");

  // The problem decides the defaults, so read it first.
  ProblemSource src;
  if (const json* p = top.get("problem")) {
    Fields pf(*p, "problem");
    int sources = 0;
    if (const json* b = pf.get("builtin")) {
      ++sources;
      src.kind = ProblemSource::Kind::Builtin;
      src.builtin = text(*b, "problem.builtin");
      const auto& names = builtin_names();
      if (std::find(names.begin(), names.end(), src.builtin) == names.end()) {
        throw ConfigError("problem.builtin", "unknown builtin '" + src.builtin + "'");
      }
    }
    if (const json* in = pf.get("inline")) {
      ++sources;
      src.kind = ProblemSource::Kind::Inline;
      src.spec = spec_from_json(*in, "problem.inline");
    }
    if (const json* r = pf.get("random")) {
      ++sources;
      src.kind = ProblemSource::Kind::Random;
      Fields rf(*r, "problem.random");
      src.randomN = static_cast<Eigen::Index>(count(rf.need("n"), rf.at("n")));
      if (src.randomN < 1) throw ConfigError(rf.at("n"), "must be at least 1");
      src.randomSeed = rf.get("seed") ? seed_of(*rf.get("seed"), rf.at("seed")) : 0;
      rf.finish();
    }
    pf.finish();
    if (sources != 1) throw ConfigError("problem", "give exactly one of builtin, inline, random");
  }
  ExperimentConfig c = default_config(src.kind == ProblemSource::Kind::Builtin ? src.builtin : "");
  c.problem = src;

  if (const json* m = top.get("method")) c.method = method_from_string(text(*m, "method"));
  if (const json* s = top.get("seed")) c.seed = seed_of(*s, "seed");
  if (const json* o = top.get("out")) c.outDir = text(*o, "out");
  if (const json* o = top.get("checkpoint")) c.checkpoint = text(*o, "checkpoint");
  if (const json* o = top.get("plots")) c.plots = boolean(*o, "plots");
  if (const json* o = top.get("timing")) c.timing = boolean(*o, "timing");

  if (const json* l = top.get("lq_pgm")) {
    Fields f(*l, "lq_pgm");
    if (auto v = f.get("tau")) c.lqPgm.tau = number(*v, f.at("tau"));
    if (auto v = f.get("tol")) c.lqPgm.tol = number(*v, f.at("tol"));
    if (auto v = f.get("kmax")) c.lqPgm.kmax = count(*v, f.at("kmax"));
    if (auto v = f.get("time_steps")) c.lqPgm.timeSteps = count(*v, f.at("time_steps"));
    if (auto v = f.get("divergence_bound")) c.lqPgm.divergenceBound = number(*v, f.at("divergence_bound"));
    f.finish();
    if (!(c.lqPgm.tau > 0.0)) throw ConfigError("lq_pgm.tau", "must be positive");
    if (!(c.lqPgm.tol > 0.0)) throw ConfigError("lq_pgm.tol", "must be positive");
    if (c.lqPgm.kmax < 1) throw ConfigError("lq_pgm.kmax", "must be at least 1");
    if (c.lqPgm.timeSteps < 1) throw ConfigError("lq_pgm.time_steps", "must be at least 1");
  }

  if (const json* d = top.get("ppgm")) {
    Fields f(*d, "ppgm");
    auto& p = c.ppgm;
    if (auto v = f.get("tau")) p.tau = number(*v, f.at("tau"));
    if (auto v = f.get("bsde_rate")) p.bsdeRate = number(*v, f.at("bsde_rate"));
    if (auto v = f.get("control_rate")) p.controlRate = number(*v, f.at("control_rate"));
    if (auto v = f.get("bsde_steps")) p.bsdeSteps = count(*v, f.at("bsde_steps"));
    if (auto v = f.get("control_steps")) p.controlSteps = count(*v, f.at("control_steps"));
    if (auto v = f.get("outer_max")) p.outerMax = count(*v, f.at("outer_max"));
    if (auto v = f.get("batch")) p.batch = count(*v, f.at("batch"));
    if (auto v = f.get("time_steps")) p.timeSteps = count(*v, f.at("time_steps"));
    if (auto v = f.get("box")) {
      const Vector box = vector_from_json(*v, f.at("box"));
      if (box.size() != 2) throw ConfigError(f.at("box"), "expected [lo, hi]");
      p.boxLo = box[0];
      p.boxHi = box[1];
    }
    if (auto v = f.get("tol_delta")) p.tolDelta = number(*v, f.at("tol_delta"));
    if (auto v = f.get("tol_bsde")) p.tolBsde = number(*v, f.at("tol_bsde"));
    if (auto v = f.get("tol_control")) p.tolControl = number(*v, f.at("tol_control"));
    if (auto v = f.get("optimizer")) {
      try {
        p.optimizer = nn::optimizer_kind_from_string(text(*v, f.at("optimizer")));
      } catch (const ConfigError&) {
        throw;
      } catch (const SpecError& e) {
        throw ConfigError(f.at("optimizer"), e.what());
      }
    }
    if (auto v = f.get("hidden")) {
      const Vector h = vector_from_json(*v, f.at("hidden"));
      p.hidden.clear();
      for (Eigen::Index i = 0; i < h.size(); ++i) {
        if (!(h[i] >= 1.0) || h[i] != std::floor(h[i])) throw ConfigError(f.at("hidden"), "layer sizes must be positive integers");
        p.hidden.push_back(static_cast<Eigen::Index>(h[i]));
      }
    }
    if (auto v = f.get("init_sigma")) p.initSigma = number(*v, f.at("init_sigma"));
    if (auto v = f.get("delta_paths")) p.deltaPaths = count(*v, f.at("delta_paths"));
    f.finish();
    try {
      p.validate();
    } catch (const SpecError& e) {
      throw ConfigError("ppgm", e.what());
    }
  }

  if (const json* e = top.get("evaluation")) {
    Fields f(*e, "evaluation");
    auto& v = c.eval;
    if (auto x = f.get("time_steps")) v.timeSteps = count(*x, f.at("time_steps"));
    if (auto x = f.get("paths")) v.paths = count(*x, f.at("paths"));
    if (auto x = f.get("x_points")) v.xPoints = count(*x, f.at("x_points"));
    if (auto x = f.get("x_lo")) v.xLo = number(*x, f.at("x_lo"));
    if (auto x = f.get("x_hi")) v.xHi = number(*x, f.at("x_hi"));
    if (auto x = f.get("monitor_paths")) v.monitorPaths = count(*x, f.at("monitor_paths"));
    if (auto x = f.get("monitor_every")) v.monitorEvery = count(*x, f.at("monitor_every"));
    f.finish();
    if (v.timeSteps < 1) throw ConfigError("evaluation.time_steps", "must be at least 1");
    if (v.paths < 2) throw ConfigError("evaluation.paths", "must be at least 2");
    if (v.xPoints < 1) throw ConfigError("evaluation.x_points", "must be at least 1");
    if (!(v.xLo <= v.xHi)) throw ConfigError("evaluation.x_lo", "must not exceed x_hi");
    if (v.monitorPaths < 2) throw ConfigError("evaluation.monitor_paths", "must be at least 2");
  }

  if (const json* s = top.get("sweep")) {
    Fields f(*s, "sweep");
    auto& w = c.sweep;
    if (auto x = f.get("kind")) {
      const std::string k = text(*x, f.at("kind"));
      if (k == "dimension") {
        w.kind = SweepConfig::Kind::Dimension;
      } else if (k == "convexity-r") {
        w.kind = SweepConfig::Kind::Convexity;
        w.values = {0.01, 0.03, 0.1, 0.3, 1.0};
      } else {
        throw ConfigError(f.at("kind"), "expected dimension or convexity-r");
      }
    }
    if (auto x = f.get("values")) {
      const Vector v = vector_from_json(*x, f.at("values"));
      w.values.assign(v.data(), v.data() + v.size());
    }
    if (auto x = f.get("repeats")) w.repeats = count(*x, f.at("repeats"));
    if (auto x = f.get("convexity_dim")) w.convexityDim = static_cast<Eigen::Index>(count(*x, f.at("convexity_dim")));
    if (auto x = f.get("with_reference")) w.withReference = boolean(*x, f.at("with_reference"));
    f.finish();
    if (w.values.empty()) throw ConfigError("sweep.values", "range must be nonempty");
    if (w.repeats < 1) throw ConfigError("sweep.repeats", "must be at least 1");
    if (w.convexityDim < 1) throw ConfigError("sweep.convexity_dim", "must be at least 1");
    for (double v : w.values) {
      if (w.kind == SweepConfig::Kind::Dimension && !(v >= 1.0 && v == std::floor(v))) {
        throw ConfigError("sweep.values", "dimensions must be positive integers");
      }
      if (w.kind == SweepConfig::Kind::Convexity && !(v > 0.0)) throw ConfigError("sweep.values", "r must be positive");
    }
  }
  top.finish();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const ExperimentConfig& c) {
  json problem;
  switch (c.problem.kind) {
    case ProblemSource::Kind::Builtin:
      problem = {{"builtin", c.problem.builtin}};
      break;
    case ProblemSource::Kind::Inline:
      problem = {{"inline", spec_to_json(c.problem.spec)}};
      break;
    case ProblemSource::Kind::Random:
      problem = {{"random", {{"n", c.problem.randomN}, {"seed", c.problem.randomSeed}}}};
      break;
  }
  const auto& p = c.ppgm;
  json out{{"problem", problem},
           {"method", to_string(c.method)},
           {"seed", c.seed},
           {"out", c.outDir},
           {"plots", c.plots},
           {"timing", c.timing},
           {"lq_pgm",
            {{"tau", c.lqPgm.tau},
             {"tol", c.lqPgm.tol},
             {"kmax", c.lqPgm.kmax},
             {"time_steps", c.lqPgm.timeSteps},
             {"divergence_bound", c.lqPgm.divergenceBound}}},
           {"ppgm",
            {{"tau", p.tau},
             {"bsde_rate", p.bsdeRate},
             {"control_rate", p.controlRate},
             {"bsde_steps", p.bsdeSteps},
             {"control_steps", p.controlSteps},
             {"outer_max", p.outerMax},
             {"batch", p.batch},
             {"time_steps", p.timeSteps},
             {"box", {p.boxLo, p.boxHi}},
             {"tol_delta", p.tolDelta},
             {"tol_bsde", p.tolBsde},
             {"tol_control", p.tolControl},
             {"optimizer", nn::to_string(p.optimizer)},
             {"hidden", p.hidden},
             {"init_sigma", p.initSigma},
             {"delta_paths", p.deltaPaths}}},
           {"evaluation",
            {{"time_steps", c.eval.timeSteps},
             {"paths", c.eval.paths},
             {"x_points", c.eval.xPoints},
             {"x_lo", c.eval.xLo},
             {"x_hi", c.eval.xHi},
             {"monitor_paths", c.eval.monitorPaths},
             {"monitor_every", c.eval.monitorEvery}}},
           {"sweep",
            {{"kind", c.sweep.kind == SweepConfig::Kind::Dimension ? "dimension" : "convexity-r"},
             {"values", c.sweep.values},
             {"repeats", c.sweep.repeats},
             {"convexity_dim", c.sweep.convexityDim},
             {"with_reference", c.sweep.withReference}}}};
  if (!c.checkpoint.empty()) out["checkpoint"] = c.checkpoint;
  return out;
}

bool is_lq(const ProblemSource& src) {
  return src.kind != ProblemSource::Kind::Builtin || is_lq_builtin(src.builtin);
}

LQSpec resolve_lq(const ProblemSource& src) {
  switch (src.kind) {
    case ProblemSource::Kind::Inline:
      return src.spec;
    case ProblemSource::Kind::Random:
      return generate_random_spec(src.randomN, src.randomSeed);
    case ProblemSource::Kind::Builtin:
      if (!is_lq_builtin(src.builtin)) throw ConfigError("problem.builtin", "'" + src.builtin + "' is not an LQ problem");
      return builtin_lq(src.builtin);
  }
  throw ConfigError("problem", "no problem source");
}

GeneralProblem resolve_problem(const ProblemSource& src) {
  if (src.kind == ProblemSource::Kind::Builtin) return builtin_problem(src.builtin);
  return to_general(resolve_lq(src), problem_label(src));
}

std::string problem_label(const ProblemSource& src) {
  switch (src.kind) {
    case ProblemSource::Kind::Builtin:
      return src.builtin;
    case ProblemSource::Kind::Inline:
      return "inline";
    case ProblemSource::Kind::Random:
      return "random-n" + std::to_string(src.randomN) + "-s" + std::to_string(src.randomSeed);
  }
  return "problem";
}

}  // namespace ppgm::cli
