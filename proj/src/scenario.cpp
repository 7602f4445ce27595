#include "netrct/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <string_view>

#include "netrct/errors.hpp"

namespace netrct {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, std::string_view where,
                    std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw parameter_error(std::string(where) + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw parameter_error(std::string(where) + ": unknown key '" + key + "'");
  }
}

template <typename T>
T read(const json& obj, const char* key, std::string_view where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw parameter_error(std::string(where) + "." + key + ": missing or wrong type");
  }
}

template <typename T>
void read_optional(const json& obj, const char* key, std::string_view where, T& out) {
  if (obj.contains(key)) out = read<T>(obj, key, where);
}

double read_cap(const json& obj, const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::numeric_limits<double>::infinity();
  return read<double>(obj, key, "dynamics.regularization");
}

WattsStrogatzParams parse_graph(const json& g) {
  reject_unknown(g, "graph", {"n", "k", "p", "seed"});
  WattsStrogatzParams params;
  params.n = read<std::uint32_t>(g, "n", "graph");
  params.k = read<std::uint32_t>(g, "k", "graph");
  params.p = read<double>(g, "p", "graph");
  read_optional(g, "seed", "graph", params.seed);
  return params;
}

void parse_dynamics(const json& d, ScenarioConfig& cfg) {
  reject_unknown(d, "dynamics",
                 {"lambda_int", "nu_damp", "delta_lambda", "models", "boost", "regularization",
                  "steps", "seed"});
  auto& dyn = cfg.dynamics;
  read_optional(d, "lambda_int", "dynamics", dyn.lambda_int);
  read_optional(d, "nu_damp", "dynamics", dyn.nu_damp);
  read_optional(d, "delta_lambda", "dynamics", dyn.delta_lambda);
  read_optional(d, "steps", "dynamics", dyn.steps);
  read_optional(d, "seed", "dynamics", dyn.seed);
  if (d.contains("boost")) dyn.boost = parse_boost_target(read<std::string>(d, "boost", "dynamics"));
  if (d.contains("models")) {
    const auto names = read<std::vector<std::string>>(d, "models", "dynamics");
    if (names.empty()) throw parameter_error("dynamics.models: must not be empty");
    cfg.models.clear();
    for (const auto& name : names) cfg.models.push_back(parse_production_model(name));
  }
  if (d.contains("regularization")) {
    const json& r = d.at("regularization");
    reject_unknown(r, "dynamics.regularization", {"mode", "nu_max", "c_max"});
    dyn.regularization.mode =
        parse_regularization_mode(read<std::string>(r, "mode", "dynamics.regularization"));
    dyn.regularization.nu_max = read_cap(r, "nu_max");
    dyn.regularization.c_max = read_cap(r, "c_max");
  }
}

AssignmentSpec parse_assignment(const json& a) {
  reject_unknown(a, "assignment", {"strategy", "size", "fraction", "seed"});
  AssignmentSpec spec;
  if (a.contains("strategy"))
    spec.strategy = parse_assignment_strategy(read<std::string>(a, "strategy", "assignment"));
  if (a.contains("size")) spec.size = read<std::uint32_t>(a, "size", "assignment");
  if (a.contains("fraction")) spec.fraction = read<double>(a, "fraction", "assignment");
  read_optional(a, "seed", "assignment", spec.seed);
  if (spec.size.has_value() == spec.fraction.has_value())
    throw parameter_error("assignment: give exactly one of 'size' or 'fraction'");
  return spec;
}

SweepSpec parse_sweep(const json& s) {
  reject_unknown(s, "sweep", {"kind", "fractions", "ks", "ps", "replications"});
  SweepSpec spec;
  const auto kind = read<std::string>(s, "kind", "sweep");
  if (kind == "size") {
    spec.kind = SweepKind::size;
  } else if (kind == "p") {
    spec.kind = SweepKind::p;
  } else {
    throw parameter_error("sweep.kind: expected 'size' or 'p', got '" + kind + "'");
  }
  read_optional(s, "fractions", "sweep", spec.fractions);
  read_optional(s, "ks", "sweep", spec.ks);
  read_optional(s, "ps", "sweep", spec.ps);
  read_optional(s, "replications", "sweep", spec.replications);
  return spec;
}

}  // namespace

std::uint32_t AssignmentSpec::resolve(std::uint32_t n) const {
  if (size) return *size;
  const auto rounded = std::llround(fraction.value_or(0.0) * n);
  return static_cast<std::uint32_t>(std::max<long long>(rounded, 1));
}

void ScenarioConfig::validate() const {
  graph.validate();
  dynamics.validate();
  window.validate(dynamics.steps);
  if (models.empty()) throw parameter_error("dynamics.models: must not be empty");
  if (assignment) {
    if (assignment->fraction && !(*assignment->fraction > 0.0 && *assignment->fraction <= 1.0))
      throw parameter_error("assignment.fraction: must lie in (0, 1]");
    const std::uint32_t size = assignment->resolve(graph.n);
    if (size < 1 || size > graph.n) throw parameter_error("assignment.size: must lie in [1, n]");
  }
  if (sweep) {
    if (sweep->replications < 1) throw parameter_error("sweep.replications: must be at least 1");
    if (sweep->kind == SweepKind::size) {
      if (sweep->fractions.empty()) throw parameter_error("sweep.fractions: must not be empty");
      if (sweep->ks.empty()) throw parameter_error("sweep.ks: must not be empty");
      for (double f : sweep->fractions) {
        if (!(f > 0.0 && f <= 1.0)) throw parameter_error("sweep.fractions: values must lie in (0, 1]");
      }
      for (std::uint32_t k : sweep->ks) {
        WattsStrogatzParams probe = graph;
        probe.k = k;
        probe.validate();
      }
    } else {
      if (sweep->ps.empty()) throw parameter_error("sweep.ps: must not be empty");
      for (double p : sweep->ps) {
        WattsStrogatzParams probe = graph;
        probe.p = p;
        probe.validate();
      }
    }
  }
}

ExperimentConfig ScenarioConfig::experiment(ProductionModel model) const {
  if (!assignment) throw parameter_error("scenario has no assignment section");
  ExperimentConfig cfg;
  cfg.graph = graph;
  cfg.dynamics = dynamics;
  cfg.dynamics.model = model;
  cfg.assignment = {assignment->strategy, assignment->resolve(graph.n), assignment->seed};
  cfg.window = window;
  cfg.allow_unstable = allow_unstable;
  return cfg;
}

ScenarioConfig parse_scenario(const nlohmann::json& doc) {
  reject_unknown(doc, "scenario",
                 {"name", "description", "graph", "dynamics", "steady_state", "assignment",
                  "sweep", "allow_unstable", "output"});
  ScenarioConfig cfg;
  read_optional(doc, "name", "scenario", cfg.name);
  if (!doc.contains("graph")) throw parameter_error("scenario: missing 'graph' section");
  cfg.graph = parse_graph(doc.at("graph"));
  if (doc.contains("dynamics")) parse_dynamics(doc.at("dynamics"), cfg);
  cfg.dynamics.model = cfg.models.front();
  if (doc.contains("steady_state")) {
    const json& w = doc.at("steady_state");
    reject_unknown(w, "steady_state", {"burn_in", "window"});
    read_optional(w, "burn_in", "steady_state", cfg.window.burn_in);
    read_optional(w, "window", "steady_state", cfg.window.window);
  }
  if (doc.contains("assignment")) cfg.assignment = parse_assignment(doc.at("assignment"));
  if (doc.contains("sweep")) cfg.sweep = parse_sweep(doc.at("sweep"));
  read_optional(doc, "allow_unstable", "scenario", cfg.allow_unstable);
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    reject_unknown(o, "output", {"dir"});
    cfg.out_dir = read<std::string>(o, "dir", "output");
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw parameter_error(path.string() + ": " + e.what());
  }
  ScenarioConfig cfg = parse_scenario(doc);
  if (!doc.contains("name")) cfg.name = path.stem().string();
  return cfg;
}

void apply_overrides(ScenarioConfig& cfg, const ScenarioOverrides& o) {
  if (o.n) cfg.graph.n = *o.n;
  if (o.k) cfg.graph.k = *o.k;
  if (o.p) cfg.graph.p = *o.p;
  if (o.seed) {
    cfg.graph.seed = *o.seed;
    cfg.dynamics.seed = *o.seed;
    if (cfg.assignment) cfg.assignment->seed = *o.seed;
  }
  if (o.steps) cfg.dynamics.steps = *o.steps;
  if (o.model) {
    cfg.models = {parse_production_model(*o.model)};
    cfg.dynamics.model = cfg.models.front();
  }
  if (o.nu_damp) cfg.dynamics.nu_damp = *o.nu_damp;
  if (o.lambda_int) cfg.dynamics.lambda_int = *o.lambda_int;
  if (o.delta_lambda) cfg.dynamics.delta_lambda = *o.delta_lambda;
  if (o.assignment || o.frac) {
    if (!cfg.assignment) cfg.assignment = AssignmentSpec{};
    if (o.assignment) cfg.assignment->strategy = parse_assignment_strategy(*o.assignment);
    if (o.frac) {
      cfg.assignment->fraction = *o.frac;
      cfg.assignment->size.reset();
    }
    if (!cfg.assignment->size && !cfg.assignment->fraction)
      throw parameter_error("--assignment needs a treatment size; pass --frac");
  }
  if (o.regularization) cfg.dynamics.regularization.mode = parse_regularization_mode(*o.regularization);
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  cfg.validate();
}

}  // namespace netrct
