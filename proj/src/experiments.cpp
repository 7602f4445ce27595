#include "netrct/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "netrct/errors.hpp"
#include "netrct/rng.hpp"

namespace netrct {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_degree_or_nan(const Graph& g, const NodeSet& nodes) {
  return nodes.empty() ? kNaN : mean_degree_of(g, nodes);
}

double graph_mean_degree(const Graph& g) {
  return 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.node_count());
}

double closed_form_c_base(const Graph& g, const DynamicsParams& params) {
  try {
    return analytic_c_base(params.lambda_int, graph_mean_degree(g), params.nu_damp);
  } catch (const stability_error&) {
    return kNaN;
  }
}

DynamicsParams bare(DynamicsParams params) {
  params.delta_lambda = 0.0;
  return params;
}

ExperimentRun run_with_baseline(const Graph& g, const ExperimentConfig& config,
                                const TimeSeries* shared_baseline) {
  const NodeSet treatment = assign(g, config.assignment);
  ExperimentRun run;
  run.groups = partition_by_treatment(g, treatment);
  auto& rep = run.report;
  const auto& groups = run.groups;

  rep.delta_lambda = config.dynamics.delta_lambda;
  rep.c_base = closed_form_c_base(g, config.dynamics);
  rep.treatment = {groups.treatment.size(), kNaN, mean_degree_or_nan(g, groups.treatment)};
  rep.neighbours = {groups.neighbours.size(), kNaN, mean_degree_or_nan(g, groups.neighbours)};
  rep.rest = {groups.rest.size(), kNaN, mean_degree_or_nan(g, groups.rest)};
  rep.control = {groups.control_size(), kNaN, mean_degree_or_nan(g, groups.control())};
  rep.within_treatment_edge_fraction = within_group_edge_fraction(g, groups.treatment);
  rep.neighbour_overlap_fraction = neighbour_overlap_fraction(g, groups.treatment);
  rep.c_base_prime = rep.e_degree_distribution = rep.e_spillover = rep.e_treatment =
      rep.e_dampening = rep.e_intrinsic = kNaN;

  if (shared_baseline) {
    run.baseline = *shared_baseline;
  } else {
    run.baseline = simulate(g, bare(config.dynamics), GroupPartition::untreated(g.node_count()),
                            false);
  }
  if (run.baseline.diverged) {
    rep.diverged = true;
    rep.divergence_step = run.baseline.divergence_step;
    return run;
  }
  run.treated = simulate(g, config.dynamics, groups);
  if (run.treated.diverged) {
    rep.diverged = true;
    rep.divergence_step = run.treated.divergence_step;
    return run;
  }

  const int w = config.window.window;
  const double base = window_mean(run.baseline, w).all;
  const StepMeans steady = window_mean(run.treated, w);
  rep.c_base_prime = base;
  rep.treatment.content = steady.treatment;
  rep.control.content = steady.control;
  rep.neighbours.content = steady.neighbours;
  rep.rest.content = steady.rest;

  rep.e_degree_distribution = base / rep.c_base - 1.0;
  rep.e_spillover = steady.control / base - 1.0;
  rep.e_treatment = steady.treatment / steady.control - 1.0;
  rep.e_dampening = rep.delta_lambda > 0.0 ? rep.e_treatment / rep.delta_lambda : kNaN;
  rep.e_intrinsic = steady.treatment / base - 1.0;
  return run;
}

std::uint32_t treatment_size(double fraction, std::uint32_t n) {
  const auto size = static_cast<std::int64_t>(std::llround(fraction * n));
  return static_cast<std::uint32_t>(std::clamp<std::int64_t>(size, 1, n));
}

Summary summarize_field(const std::vector<EffectReport>& reports, double EffectReport::*field) {
  std::vector<double> values;
  for (const auto& r : reports) {
    const double v = r.*field;
    if (!r.diverged && std::isfinite(v)) values.push_back(v);
  }
  return summarize(values);
}

Summary summarize_group(const std::vector<EffectReport>& reports, GroupStats EffectReport::*group) {
  std::vector<double> values;
  for (const auto& r : reports) {
    const double v = (r.*group).content;
    if (!r.diverged && std::isfinite(v)) values.push_back(v);
  }
  return summarize(values);
}

void finish_point(SweepPoint& point) {
  const auto& reps = point.reports;
  point.c_base_prime = summarize_field(reps, &EffectReport::c_base_prime);
  point.c_treatment = summarize_group(reps, &EffectReport::treatment);
  point.c_control = summarize_group(reps, &EffectReport::control);
  point.c_neighbours = summarize_group(reps, &EffectReport::neighbours);
  point.c_rest = summarize_group(reps, &EffectReport::rest);
  point.e_spillover = summarize_field(reps, &EffectReport::e_spillover);
  point.e_treatment = summarize_field(reps, &EffectReport::e_treatment);
  point.e_dampening = summarize_field(reps, &EffectReport::e_dampening);
  point.e_intrinsic = summarize_field(reps, &EffectReport::e_intrinsic);
  point.e_degree_distribution = summarize_field(reps, &EffectReport::e_degree_distribution);
  if (point.status == "ok") {
    point.failures = static_cast<int>(
        std::count_if(reps.begin(), reps.end(), [](const auto& r) { return r.diverged; }));
    if (point.failures > 0)
      point.status = "diverged " + std::to_string(point.failures) + "/" +
                     std::to_string(point.replications);
  }
}

std::string sanitize(std::string message) {
  std::replace(message.begin(), message.end(), ',', ';');
  std::replace(message.begin(), message.end(), '\n', ' ');
  return message;
}

}  // namespace

std::string_view to_string(AssignmentStrategy s) noexcept {
  return s == AssignmentStrategy::random ? "random" : "clustered";
}

AssignmentStrategy parse_assignment_strategy(std::string_view s) {
  if (s == "random") return AssignmentStrategy::random;
  if (s == "clustered") return AssignmentStrategy::clustered;
  throw parameter_error("unknown assignment strategy '" + std::string(s) +
                        "' (expected random or clustered)");
}

void SteadyStateWindow::validate(int steps) const {
  if (burn_in < 1 || window < 1) throw parameter_error("burn_in and window must be positive");
  if (burn_in + window > steps) throw parameter_error("burn_in + window must not exceed steps");
}

void ExperimentConfig::validate() const {
  graph.validate();
  dynamics.validate();
  window.validate(dynamics.steps);
  if (assignment.size < 1 || assignment.size > graph.n)
    throw parameter_error("treatment size N must lie in [1, n]");
  if (!allow_unstable && dynamics.regularization.mode == RegularizationMode::none &&
      !(stability_margin(graph.k, dynamics.nu_damp, dynamics.delta_lambda, dynamics.boost) > 0.0))
    throw stability_error("parameters are outside the stable region; set allow_unstable to run");
}

NodeSet assign_random(const Graph& g, std::uint32_t size, std::uint64_t seed) {
  const std::size_t n = g.node_count();
  if (size < 1 || size > n) throw parameter_error("treatment size N must lie in [1, n]");
  NodeSet nodes(n);
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  CounterStream rng(derive_key(seed, {0xa551}));
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(nodes[i], nodes[j]);
  }
  nodes.resize(size);
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

NodeSet assign_clustered(const Graph& g, std::uint32_t size) {
  if (size < 1 || size > g.node_count())
    throw parameter_error("treatment size N must lie in [1, n]");
  NodeSet nodes(size);
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  return nodes;
}

NodeSet assign(const Graph& g, const Assignment& assignment) {
  return assignment.strategy == AssignmentStrategy::random
             ? assign_random(g, assignment.size, assignment.seed)
             : assign_clustered(g, assignment.size);
}

double run_baseline(const Graph& g, const DynamicsParams& params,
                    const SteadyStateWindow& window) {
  const DynamicsParams bare_params = bare(params);
  window.validate(bare_params.steps);
  const TimeSeries series =
      simulate(g, bare_params, GroupPartition::untreated(g.node_count()), false);
  if (series.diverged) throw divergence_error(series.divergence_step);
  return window_mean(series, window.window).all;
}

double degree_distribution_effect(const Graph& g, const DynamicsParams& params,
                                  const SteadyStateWindow& window) {
  const double c_base = analytic_c_base(params.lambda_int, graph_mean_degree(g), params.nu_damp);
  return run_baseline(g, params, window) / c_base - 1.0;
}

ExperimentRun run_experiment(const Graph& g, const ExperimentConfig& config) {
  config.validate();
  if (g.node_count() != config.graph.n) throw parameter_error("graph does not match config");
  return run_with_baseline(g, config, nullptr);
}

ExperimentRun run_experiment(const ExperimentConfig& config) {
  config.validate();
  return run_with_baseline(generate_watts_strogatz(config.graph), config, nullptr);
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) return {kNaN, kNaN};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return {mean, kNaN};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

SweepResult run_size_sweep(const ExperimentConfig& base, std::span<const double> fractions,
                           std::span<const std::uint32_t> ks, int replications) {
  if (fractions.empty() || ks.empty()) throw parameter_error("sweep axes must not be empty");
  if (replications < 1) throw parameter_error("replications must be at least 1");
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw parameter_error("fractions must lie in (0, 1]");
  }
  // Validate every grid point before running any of them.
  for (std::uint32_t k : ks) {
    ExperimentConfig probe = base;
    probe.graph.k = k;
    for (double f : fractions) {
      probe.assignment.size = treatment_size(f, probe.graph.n);
      probe.validate();
    }
  }

  const std::size_t nk = ks.size(), nf = fractions.size();
  const auto reps = static_cast<std::size_t>(replications);
  SweepResult result;
  result.points.resize(nk * nf);
  for (std::size_t ki = 0; ki < nk; ++ki) {
    for (std::size_t fi = 0; fi < nf; ++fi) {
      auto& pt = result.points[ki * nf + fi];
      pt.k = ks[ki];
      pt.p = base.graph.p;
      pt.n = base.graph.n;
      pt.size = treatment_size(fractions[fi], base.graph.n);
      pt.fraction = fractions[fi];
      pt.delta_lambda = base.dynamics.delta_lambda;
      pt.replications = replications;
      pt.reports.resize(reps);
    }
  }

  // One job per (k, replication): a graph and its baseline serve every fraction.
  const auto jobs = static_cast<std::int64_t>(nk * reps);
  std::vector<std::optional<std::string>> errors(nk * reps);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t job = 0; job < jobs; ++job) {
    const std::size_t ki = static_cast<std::size_t>(job) / reps;
    const std::size_t r = static_cast<std::size_t>(job) % reps;
    try {
      ExperimentConfig cfg = base;
      cfg.graph.k = ks[ki];
      cfg.graph.seed = derive_key(base.graph.seed, {r});
      cfg.dynamics.seed = derive_key(base.dynamics.seed, {r});
      cfg.assignment.strategy = AssignmentStrategy::random;
      const Graph g = generate_watts_strogatz(cfg.graph);
      const TimeSeries baseline =
          simulate(g, bare(cfg.dynamics), GroupPartition::untreated(g.node_count()), false);
      for (std::size_t fi = 0; fi < nf; ++fi) {
        auto& pt = result.points[ki * nf + fi];
        cfg.assignment.size = pt.size;
        cfg.assignment.seed = derive_key(base.assignment.seed, {r, fi});
        pt.reports[r] = run_with_baseline(g, cfg, &baseline).report;
      }
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(job)] = sanitize(e.what());
    }
  }

  for (std::size_t ki = 0; ki < nk; ++ki) {
    for (std::size_t fi = 0; fi < nf; ++fi) {
      auto& pt = result.points[ki * nf + fi];
      for (std::size_t r = 0; r < reps; ++r) {
        if (const auto& err = errors[ki * reps + r]) {
          pt.status = "failed: " + *err;
          pt.reports[r].diverged = true;
        }
      }
      finish_point(pt);
    }
  }
  return result;
}

SweepResult run_p_sweep(const WattsStrogatzParams& graph, const DynamicsParams& dynamics,
                        const SteadyStateWindow& window, std::span<const double> ps,
                        int replications) {
  if (ps.empty()) throw parameter_error("sweep axes must not be empty");
  if (replications < 1) throw parameter_error("replications must be at least 1");
  graph.validate();
  dynamics.validate();
  window.validate(dynamics.steps);
  for (double p : ps) {
    WattsStrogatzParams probe = graph;
    probe.p = p;
    probe.validate();
  }
  // Throws stability_error for an unstable (k, nu_damp).
  analytic_c_base(dynamics.lambda_int, graph.k, dynamics.nu_damp);

  const std::size_t np = ps.size();
  const auto reps = static_cast<std::size_t>(replications);
  SweepResult result;
  result.points.resize(np);
  for (std::size_t pi = 0; pi < np; ++pi) {
    auto& pt = result.points[pi];
    pt.k = graph.k;
    pt.p = ps[pi];
    pt.n = graph.n;
    pt.size = 0;
    pt.fraction = 0.0;
    pt.delta_lambda = 0.0;
    pt.replications = replications;
    pt.reports.resize(reps);
  }

  const auto jobs = static_cast<std::int64_t>(np * reps);
  std::vector<std::optional<std::string>> errors(np * reps);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t job = 0; job < jobs; ++job) {
    const std::size_t pi = static_cast<std::size_t>(job) / reps;
    const std::size_t r = static_cast<std::size_t>(job) % reps;
    try {
      WattsStrogatzParams gp = graph;
      gp.p = ps[pi];
      gp.seed = derive_key(graph.seed, {r});
      DynamicsParams dp = bare(dynamics);
      dp.seed = derive_key(dynamics.seed, {r});
      const Graph g = generate_watts_strogatz(gp);

      EffectReport rep;
      rep.c_base = closed_form_c_base(g, dp);
      rep.treatment = rep.control = rep.neighbours = rep.rest = {0, kNaN, kNaN};
      rep.within_treatment_edge_fraction = rep.neighbour_overlap_fraction = kNaN;
      rep.e_spillover = rep.e_treatment = rep.e_dampening = rep.e_intrinsic = kNaN;
      const TimeSeries series = simulate(g, dp, GroupPartition::untreated(g.node_count()), false);
      if (series.diverged) {
        rep.diverged = true;
        rep.divergence_step = series.divergence_step;
        rep.c_base_prime = rep.e_degree_distribution = kNaN;
      } else {
        rep.c_base_prime = window_mean(series, window.window).all;
        rep.e_degree_distribution = rep.c_base_prime / rep.c_base - 1.0;
      }
      result.points[pi].reports[r] = rep;
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(job)] = sanitize(e.what());
    }
  }

  for (std::size_t pi = 0; pi < np; ++pi) {
    auto& pt = result.points[pi];
    for (std::size_t r = 0; r < reps; ++r) {
      if (const auto& err = errors[pi * reps + r]) {
        pt.status = "failed: " + *err;
        pt.reports[r].diverged = true;
      }
    }
    finish_point(pt);
  }
  return result;
}

std::map<std::size_t, DegreeBucket> content_by_degree(const Graph& g,
                                                      std::span<const double> values) {
  if (values.size() != g.node_count()) throw parameter_error("state length does not match graph");
  std::map<std::size_t, DegreeBucket> buckets;
  for (NodeId i = 0; i < g.node_count(); ++i) {
    auto& b = buckets[g.degree(i)];
    ++b.count;
    b.mean_content += values[i];
  }
  for (auto& [degree, b] : buckets) b.mean_content /= static_cast<double>(b.count);
  return buckets;
}

}  // namespace netrct
