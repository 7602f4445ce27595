#pragma once

// Scenario files: one JSON document describing a graph, the dynamics, an
// optional treatment assignment and optional sweep axes. Unknown keys are
// rejected and every part is validated before anything runs.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "netrct/experiments.hpp"

namespace netrct {

struct AssignmentSpec {
  AssignmentStrategy strategy = AssignmentStrategy::random;
  std::optional<std::uint32_t> size;
  std::optional<double> fraction;
  std::uint64_t seed = 0;

  /// N from `size`, else round(fraction * n), clamped to at least 1.
  std::uint32_t resolve(std::uint32_t n) const;
};

enum class SweepKind { size, p };

struct SweepSpec {
  SweepKind kind = SweepKind::size;
  std::vector<double> fractions;
  std::vector<std::uint32_t> ks;
  std::vector<double> ps;
  int replications = 5;
};

struct ScenarioConfig {
  std::string name = "scenario";
  WattsStrogatzParams graph;
  DynamicsParams dynamics;  // dynamics.model mirrors models.front()
  std::vector<ProductionModel> models{ProductionModel::constant};
  SteadyStateWindow window;
  std::optional<AssignmentSpec> assignment;
  std::optional<SweepSpec> sweep;
  bool allow_unstable = false;
  std::filesystem::path out_dir = "out";

  void validate() const;

  /// ExperimentConfig for one production model. Requires an assignment.
  ExperimentConfig experiment(ProductionModel model) const;
};

/// Command-line overrides applied on top of a parsed file.
struct ScenarioOverrides {
  std::optional<std::uint32_t> n, k;
  std::optional<double> p;
  std::optional<std::uint64_t> seed;  // graph, dynamics and assignment seeds
  std::optional<int> steps;
  std::optional<std::string> model;
  std::optional<double> nu_damp, lambda_int, delta_lambda, frac;
  std::optional<std::string> assignment;
  std::optional<std::string> regularization;
  std::optional<std::filesystem::path> out_dir;
};

/// Throws parameter_error (with the offending key path) on malformed input.
ScenarioConfig parse_scenario(const nlohmann::json& doc);

ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Applies overrides and re-validates.
void apply_overrides(ScenarioConfig& config, const ScenarioOverrides& overrides);

}  // namespace netrct
