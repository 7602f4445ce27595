#pragma once

// Randomized controlled trials on Watts-Strogatz graphs: treatment assignment,
// bare and treated runs, effect metrics and parameter sweeps.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "netrct/dynamics.hpp"
#include "netrct/graph.hpp"

namespace netrct {

enum class AssignmentStrategy { random, clustered };

std::string_view to_string(AssignmentStrategy s) noexcept;
AssignmentStrategy parse_assignment_strategy(std::string_view s);

struct Assignment {
  AssignmentStrategy strategy = AssignmentStrategy::random;
  std::uint32_t size = 1;  // N
  std::uint64_t seed = 0;
};

/// Steady state is the average over the last `window` of `steps`; the first
/// `burn_in` steps are never averaged.
struct SteadyStateWindow {
  int burn_in = 20;
  int window = 10;

  void validate(int steps) const;
};

struct ExperimentConfig {
  WattsStrogatzParams graph;
  DynamicsParams dynamics;
  Assignment assignment;
  SteadyStateWindow window;
  bool allow_unstable = false;  // divergence studies

  void validate() const;
};

struct GroupStats {
  std::size_t size = 0;
  double content = 0.0;      // steady-state mean
  double mean_degree = 0.0;  // NaN for an empty group
};

struct EffectReport {
  double delta_lambda = 0.0;
  double c_base = 0.0;        // closed form, NaN when unstable
  double c_base_prime = 0.0;  // simulated bare steady state
  GroupStats treatment;
  GroupStats control;
  GroupStats neighbours;
  GroupStats rest;
  double within_treatment_edge_fraction = 0.0;
  double neighbour_overlap_fraction = 0.0;

  double e_degree_distribution = 0.0;  // c_base' / c_base - 1
  double e_spillover = 0.0;            // c_control / c_base' - 1
  double e_treatment = 0.0;            // c_treatment / c_control - 1
  double e_dampening = 0.0;            // e_treatment / delta_lambda
  double e_intrinsic = 0.0;            // c_treatment / c_base' - 1

  bool diverged = false;
  int divergence_step = 0;
};

struct ExperimentRun {
  EffectReport report;
  GroupPartition groups;
  TimeSeries baseline;
  TimeSeries treated;
};

NodeSet assign_random(const Graph& g, std::uint32_t size, std::uint64_t seed);

/// Nodes {0, ..., size-1}: contiguous positions on the original ring.
NodeSet assign_clustered(const Graph& g, std::uint32_t size);

NodeSet assign(const Graph& g, const Assignment& assignment);

/// Simulated bare steady state c_base' (delta_lambda forced to 0). Throws
/// divergence_error if the run diverges.
double run_baseline(const Graph& g, const DynamicsParams& params, const SteadyStateWindow& window);

/// c_base' / c_base - 1 on `g`, with c_base from the closed form at the
/// graph's mean degree.
double degree_distribution_effect(const Graph& g, const DynamicsParams& params,
                                  const SteadyStateWindow& window);

/// Runs a bare and a treated simulation on `g` and fills every report field.
/// Divergence is flagged on the report.
ExperimentRun run_experiment(const Graph& g, const ExperimentConfig& config);

/// Same, building the graph from config.graph first.
ExperimentRun run_experiment(const ExperimentConfig& config);

/// Mean and sample standard deviation (NaN when fewer than two samples).
struct Summary {
  double mean = 0.0;
  double stddev = 0.0;
};

Summary summarize(std::span<const double> values);

struct SweepPoint {
  std::uint32_t k = 0;
  double p = 0.0;
  std::uint32_t n = 0;
  std::uint32_t size = 0;  // N
  double fraction = 0.0;
  double delta_lambda = 0.0;
  int replications = 0;
  std::vector<EffectReport> reports;  // one per replication, in seed order

  Summary c_base_prime, c_treatment, c_control, c_neighbours, c_rest;
  Summary e_spillover, e_treatment, e_dampening, e_intrinsic, e_degree_distribution;

  int failures = 0;  // diverged or failed replications
  std::string status = "ok";
};

struct SweepResult {
  std::vector<SweepPoint> points;  // grid order
};

/// For each k and each N/n, runs `replications` random-assignment experiments
/// on fresh graphs and averages the metrics. Replication r uses graph, dynamics
/// and assignment seeds derived from the base config's seeds and r.
SweepResult run_size_sweep(const ExperimentConfig& base, std::span<const double> fractions,
                           std::span<const std::uint32_t> ks, int replications);

/// Degree-distribution effect per rewiring probability, seed-replicated.
SweepResult run_p_sweep(const WattsStrogatzParams& graph, const DynamicsParams& dynamics,
                        const SteadyStateWindow& window, std::span<const double> ps,
                        int replications);

struct DegreeBucket {
  std::size_t count = 0;
  double mean_content = 0.0;
};

std::map<std::size_t, DegreeBucket> content_by_degree(const Graph& g,
                                                      std::span<const double> values);

}  // namespace netrct
