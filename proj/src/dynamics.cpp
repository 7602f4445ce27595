#include "netrct/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <string>

#include "netrct/errors.hpp"
#include "netrct/rng.hpp"

namespace netrct {

namespace {

constexpr std::uint64_t kProductionDomain = 0xc0de;

double draw(ProductionModel model, double rate, std::uint64_t key) {
  switch (model) {
    case ProductionModel::constant:
      return rate;
    case ProductionModel::uniform: {
      CounterStream rng(key);
      return 2.0 * rate * rng.uniform01();
    }
    case ProductionModel::poisson: {
      if (!(rate > 0.0)) return 0.0;
      if (!std::isfinite(rate)) return rate;
      CounterStream rng(key);
      std::poisson_distribution<long long> pois(rate);
      return static_cast<double>(pois(rng));
    }
  }
  return rate;
}

double cap(RegularizationMode mode, double limit, double value) {
  if (!std::isfinite(limit)) return value;
  switch (mode) {
    case RegularizationMode::none: return value;
    case RegularizationMode::hard_cap: return std::min(limit, value);
    case RegularizationMode::sigmoid: return limit * logistic(value);
  }
  return value;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

double logistic(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

void DynamicsParams::validate() const {
  if (!(lambda_int >= 0.0) || !std::isfinite(lambda_int))
    throw parameter_error("lambda_int must be finite and non-negative");
  if (!(nu_damp >= 0.0) || !std::isfinite(nu_damp))
    throw parameter_error("nu_damp must be finite and non-negative");
  if (!(delta_lambda >= 0.0) || !std::isfinite(delta_lambda))
    throw parameter_error("delta_lambda must be finite and non-negative");
  if (steps < 1) throw parameter_error("steps must be at least 1");
  if (regularization.mode != RegularizationMode::none) {
    if (!(regularization.nu_max > 0.0) || !(regularization.c_max > 0.0))
      throw parameter_error("regularization caps nu_max and c_max must be positive");
    if (std::isinf(regularization.nu_max) && std::isinf(regularization.c_max))
      throw parameter_error("regularization needs a finite nu_max or c_max");
  }
}

std::string_view to_string(ProductionModel m) noexcept {
  switch (m) {
    case ProductionModel::constant: return "constant";
    case ProductionModel::uniform: return "uniform";
    case ProductionModel::poisson: return "poisson";
  }
  return "?";
}

std::string_view to_string(RegularizationMode m) noexcept {
  switch (m) {
    case RegularizationMode::none: return "none";
    case RegularizationMode::hard_cap: return "hard_cap";
    case RegularizationMode::sigmoid: return "sigmoid";
  }
  return "?";
}

std::string_view to_string(BoostTarget b) noexcept {
  return b == BoostTarget::intrinsic ? "intrinsic" : "total";
}

ProductionModel parse_production_model(std::string_view s) {
  if (s == "constant") return ProductionModel::constant;
  if (s == "uniform") return ProductionModel::uniform;
  if (s == "poisson") return ProductionModel::poisson;
  throw parameter_error("unknown production model '" + std::string(s) +
                        "' (expected constant, uniform or poisson)");
}

RegularizationMode parse_regularization_mode(std::string_view s) {
  if (s == "none") return RegularizationMode::none;
  if (s == "hard_cap") return RegularizationMode::hard_cap;
  if (s == "sigmoid") return RegularizationMode::sigmoid;
  throw parameter_error("unknown regularization '" + std::string(s) +
                        "' (expected none, hard_cap or sigmoid)");
}

BoostTarget parse_boost_target(std::string_view s) {
  if (s == "intrinsic") return BoostTarget::intrinsic;
  if (s == "total") return BoostTarget::total;
  throw parameter_error("unknown boost target '" + std::string(s) +
                        "' (expected intrinsic or total)");
}

double update_node(const Graph& g, std::span<const double> prev, const DynamicsParams& params,
                   bool treated, int t, NodeId node) {
  double sum = 0.0;
  for (NodeId j : g.neighbours(node)) sum += prev[j];

  const auto& reg = params.regularization;
  const double feedback = cap(reg.mode, reg.nu_max, params.nu_damp * sum);

  double rate;
  if (!treated) {
    rate = params.lambda_int + feedback;
  } else if (params.boost == BoostTarget::intrinsic) {
    rate = params.lambda_int * (1.0 + params.delta_lambda) + feedback;
  } else {
    rate = (params.lambda_int + feedback) * (1.0 + params.delta_lambda);
  }

  const std::uint64_t key =
      derive_key(params.seed, {kProductionDomain, node, static_cast<std::uint64_t>(t)});
  return cap(reg.mode, reg.c_max, draw(params.model, rate, key));
}

void step_into(const Graph& g, const ContentState& state, ContentState& next,
               const DynamicsParams& params, std::span<const std::uint8_t> treated) {
  const std::size_t n = g.node_count();
  if (state.values.size() != n) throw parameter_error("state length does not match graph");
  if (!treated.empty() && treated.size() != n)
    throw parameter_error("treatment mask length does not match graph");

  const int t = state.t + 1;
  next.t = t;
  next.values.resize(n);
  const std::span<const double> prev(state.values);
  const bool check = params.regularization.mode == RegularizationMode::none;
  std::atomic<bool> blown{false};

  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto node = static_cast<NodeId>(i);
    const bool is_treated = !treated.empty() && treated[node] != 0;
    const double c = update_node(g, prev, params, is_treated, t, node);
    next.values[node] = c;
    if (check && !std::isfinite(c)) blown.store(true, std::memory_order_relaxed);
  }
  if (blown.load()) throw divergence_error(t);
}

ContentState step(const Graph& g, const ContentState& state, const DynamicsParams& params,
                  std::span<const std::uint8_t> treated) {
  ContentState next;
  step_into(g, state, next, params, treated);
  return next;
}

TimeSeries simulate(const Graph& g, const DynamicsParams& params, const GroupPartition& groups,
                    bool keep_final) {
  params.validate();
  const std::size_t n = g.node_count();
  if (groups.labels.size() != n) throw parameter_error("partition does not match graph");

  std::vector<std::uint8_t> treated;
  if (!groups.treatment.empty()) treated = membership_mask(n, groups.treatment);

  const double n_treat = static_cast<double>(groups.treatment.size());
  const double n_nb = static_cast<double>(groups.neighbours.size());
  const double n_rest = static_cast<double>(groups.rest.size());
  const double n_ctrl = n_nb + n_rest;
  auto ratio = [](double sum, double count) { return count > 0 ? sum / count : nan(); };

  TimeSeries series;
  series.rows.reserve(static_cast<std::size_t>(params.steps));
  ContentState current = ContentState::zeros(n);
  ContentState next;

  for (int s = 0; s < params.steps; ++s) {
    try {
      step_into(g, current, next, params, treated);
    } catch (const divergence_error& e) {
      series.diverged = true;
      series.divergence_step = e.step();
      break;
    }
    std::swap(current, next);

    double sums[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i)
      sums[static_cast<int>(groups.labels[i])] += current.values[i];

    StepMeans row;
    row.t = current.t;
    row.treatment = ratio(sums[0], n_treat);
    row.neighbours = ratio(sums[1], n_nb);
    row.rest = ratio(sums[2], n_rest);
    row.control = ratio(sums[1] + sums[2], n_ctrl);
    row.all = (sums[0] + sums[1] + sums[2]) / static_cast<double>(n);
    series.rows.push_back(row);

    const bool blown = !std::isfinite(row.all) || row.all > kDivergenceThreshold ||
                       row.treatment > kDivergenceThreshold ||
                       row.neighbours > kDivergenceThreshold || row.rest > kDivergenceThreshold;
    if (blown) {
      series.diverged = true;
      series.divergence_step = row.t;
      break;
    }
  }
  if (keep_final) series.final_values = std::move(current.values);
  return series;
}

StepMeans window_mean(const TimeSeries& series, int window) {
  if (window < 1) throw parameter_error("window must be at least 1");
  if (series.rows.size() < static_cast<std::size_t>(window))
    throw parameter_error("time series shorter than the averaging window");
  StepMeans out;
  const auto begin = series.rows.end() - window;
  for (auto it = begin; it != series.rows.end(); ++it) {
    out.all += it->all;
    out.treatment += it->treatment;
    out.neighbours += it->neighbours;
    out.rest += it->rest;
    out.control += it->control;
  }
  const double w = window;
  out.t = series.rows.back().t;
  out.all /= w;
  out.treatment /= w;
  out.neighbours /= w;
  out.rest /= w;
  out.control /= w;
  return out;
}

double analytic_c_base(double lambda_int, double k, double nu_damp) {
  const double margin = 1.0 - k * nu_damp;
  if (!(margin > 0.0))
    throw stability_error("k * nu_damp must be below 1 for a steady state");
  return lambda_int / margin;
}

double analytic_c_full(double lambda_int, double k, double nu_damp, double delta_lambda,
                       BoostTarget boost) {
  const double margin = stability_margin(k, nu_damp, delta_lambda, boost);
  if (!(margin > 0.0))
    throw stability_error("fully boosted network has no steady state");
  return (1.0 + delta_lambda) * lambda_int / margin;
}

double stability_margin(double k, double nu_damp, double delta_lambda, BoostTarget boost) {
  const double gain = boost == BoostTarget::total ? (1.0 + delta_lambda) * k * nu_damp
                                                  : k * nu_damp;
  return 1.0 - gain;
}

double regularized_fixed_point(double lambda_int, double k, double nu_damp, double nu_max) {
  if (!(nu_max > 0.0)) throw parameter_error("nu_max must be positive");
  constexpr int kMaxIterations = 100000;
  constexpr double kTolerance = 1e-10;
  constexpr double kDamping = 0.5;
  auto map = [&](double c) { return lambda_int + nu_max * logistic(c * k * nu_damp); };

  double c = lambda_int;
  for (int i = 0; i < kMaxIterations; ++i) {
    const double next = (1.0 - kDamping) * c + kDamping * map(c);
    if (std::abs(next - c) < kTolerance * kDamping && std::abs(map(next) - next) < kTolerance)
      return next;
    c = next;
  }
  throw numeric_error("regularized fixed point did not converge");
}

}  // namespace netrct
