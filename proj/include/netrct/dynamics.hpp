#pragma once

// Discrete-time content production with neighbour feedback.
//
// Each step every node reads its neighbours' content from the previous step:
//   feedback_i = nu_damp * sum_j c_j          (optionally capped)
//   rate_i     = lambda_int + feedback_i      (treated nodes boosted by delta_lambda)
//   c_i        ~ R(rate_i)                    (optionally capped)
// All nodes update simultaneously from the same snapshot.

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "netrct/graph.hpp"

namespace netrct {

/// Distribution of a node's production given its rate. All have mean = rate.
enum class ProductionModel { constant, uniform, poisson };

enum class RegularizationMode { none, hard_cap, sigmoid };

/// Which part of a treated node's rate the boost multiplies.
///   intrinsic: rate = lambda_int * (1 + delta) + feedback
///   total:     rate = (lambda_int + feedback) * (1 + delta)
enum class BoostTarget { intrinsic, total };

struct Regularization {
  RegularizationMode mode = RegularizationMode::none;
  // An infinite cap leaves that term unregularized.
  double nu_max = std::numeric_limits<double>::infinity();
  double c_max = std::numeric_limits<double>::infinity();
};

struct DynamicsParams {
  double lambda_int = 1.0;
  double nu_damp = 0.01;
  double delta_lambda = 0.0;
  ProductionModel model = ProductionModel::constant;
  Regularization regularization;
  BoostTarget boost = BoostTarget::intrinsic;
  int steps = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ContentState {
  int t = 0;
  std::vector<double> values;

  static ContentState zeros(std::size_t n) { return {0, std::vector<double>(n, 0.0)}; }
};

/// Group means for one step. Empty groups hold NaN.
struct StepMeans {
  int t = 0;
  double all = 0.0;
  double treatment = 0.0;
  double neighbours = 0.0;
  double rest = 0.0;
  double control = 0.0;
};

struct TimeSeries {
  std::vector<StepMeans> rows;
  bool diverged = false;
  int divergence_step = 0;        // step at which divergence was detected
  std::vector<double> final_values;  // per-node content at the last completed step
};

/// Means above this (or non-finite) mark a run divergent.
inline constexpr double kDivergenceThreshold = 1e12;

double logistic(double x) noexcept;

std::string_view to_string(ProductionModel m) noexcept;
std::string_view to_string(RegularizationMode m) noexcept;
std::string_view to_string(BoostTarget b) noexcept;
ProductionModel parse_production_model(std::string_view s);
RegularizationMode parse_regularization_mode(std::string_view s);
BoostTarget parse_boost_target(std::string_view s);

/// Content of `node` at step `t` given the step t-1 snapshot `prev`. Pure in
/// (params.seed, node, t); step() is this function applied to every node.
double update_node(const Graph& g, std::span<const double> prev, const DynamicsParams& params,
                   bool treated, int t, NodeId node);

/// Advances `state` one step into `next` (resized as needed). `treated` is a
/// membership mask of length n, or empty for no treatment. Throws
/// divergence_error on non-finite output when unregularized.
void step_into(const Graph& g, const ContentState& state, ContentState& next,
               const DynamicsParams& params, std::span<const std::uint8_t> treated);

ContentState step(const Graph& g, const ContentState& state, const DynamicsParams& params,
                  std::span<const std::uint8_t> treated);

/// Runs params.steps steps from the all-zero state and records group means.
/// Divergence is flagged on the result, not thrown.
TimeSeries simulate(const Graph& g, const DynamicsParams& params, const GroupPartition& groups,
                    bool keep_final = true);

/// Mean of the group means over the final `window` rows.
StepMeans window_mean(const TimeSeries& series, int window);

// Closed-form oracles for the constant model on a k-regular graph.

/// lambda_int / (1 - k nu_damp). Throws stability_error if k nu_damp >= 1.
double analytic_c_base(double lambda_int, double k, double nu_damp);

/// Fixed point when every node is boosted.
double analytic_c_full(double lambda_int, double k, double nu_damp, double delta_lambda,
                       BoostTarget boost);

/// 1 - gain, where gain is the feedback multiplier of the boosted recurrence.
/// Positive: stable. Zero: linear growth. Negative: divergent.
double stability_margin(double k, double nu_damp, double delta_lambda, BoostTarget boost);

/// Solves c = lambda_int + nu_max * logistic(c k nu_damp) by damped
/// fixed-point iteration to 1e-10.
double regularized_fixed_point(double lambda_int, double k, double nu_damp, double nu_max);

}  // namespace netrct
