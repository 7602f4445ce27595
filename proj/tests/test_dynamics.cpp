#include <doctest.h>

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "netrct/dynamics.hpp"
#include "netrct/errors.hpp"
#include "netrct/rng.hpp"

using namespace netrct;

namespace {

// Root of c = lambda + nu_max * logistic(c k nu) by bisection, independent of
// the library's damped iteration.
double bisect_fixed_point(double lambda, double k, double nu, double nu_max) {
  auto f = [&](double c) { return lambda + nu_max / (1.0 + std::exp(-c * k * nu)) - c; };
  double lo = lambda, hi = lambda + nu_max;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> steady_values(const Graph& g, const DynamicsParams& params) {
  return simulate(g, params, GroupPartition::untreated(g.node_count())).final_values;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("closed forms") {
  CHECK(analytic_c_base(1.0, 50, 0.01) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(analytic_c_base(1.0, 49.2, 0.01) == doctest::Approx(1.968503937007874).epsilon(1e-12));
  CHECK(std::abs(analytic_c_base(1.0, 49.2, 0.01) - 1.9686) < 1e-4);
  CHECK_THROWS_AS(analytic_c_base(1.0, 100, 0.01), stability_error);
  CHECK_THROWS_AS(analytic_c_base(1.0, 200, 0.01), stability_error);

  CHECK(analytic_c_full(1, 50, 0.01, 0.05, BoostTarget::total) ==
        doctest::Approx(2.210526315789474).epsilon(1e-12));
  CHECK(analytic_c_full(1, 10, 0.01, 0.5, BoostTarget::total) ==
        doctest::Approx(1.764705882352941).epsilon(1e-12));
  CHECK(analytic_c_full(1, 50, 0.01, 0.05, BoostTarget::intrinsic) ==
        doctest::Approx(2.1).epsilon(1e-12));
  CHECK(analytic_c_full(1, 50, 0.01, 0.0, BoostTarget::total) == doctest::Approx(2.0));
  CHECK_THROWS_AS(analytic_c_full(1, 90, 0.01, 0.2, BoostTarget::total), stability_error);

  CHECK(stability_margin(50, 0.01, 0.0, BoostTarget::total) == doctest::Approx(0.5));
  CHECK(stability_margin(100, 0.01, 0.0, BoostTarget::intrinsic) == doctest::Approx(0.0));
  CHECK(stability_margin(200, 0.01, 0.0, BoostTarget::total) < 0.0);
  CHECK(stability_margin(90, 0.01, 0.2, BoostTarget::total) < 0.0);
  CHECK(stability_margin(90, 0.01, 0.2, BoostTarget::intrinsic) > 0.0);
}

TEST_CASE("regularized fixed point against bisection") {
  const double oracle = 1.865994078105337;
  CHECK(bisect_fixed_point(1.0, 100, 0.01, 1.0) == doctest::Approx(oracle).epsilon(1e-13));
  CHECK(regularized_fixed_point(1.0, 100, 0.01, 1.0) == doctest::Approx(oracle).epsilon(1e-9));
  for (double nu_max : {0.1, 0.5, 2.0, 10.0}) {
    CAPTURE(nu_max);
    CHECK(regularized_fixed_point(1.0, 100, 0.01, nu_max) ==
          doctest::Approx(bisect_fixed_point(1.0, 100, 0.01, nu_max)).epsilon(1e-9));
  }
  CHECK(regularized_fixed_point(1.0, 100, 0.01, 1e-12) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK_THROWS_AS(regularized_fixed_point(1.0, 100, 0.01, 0.0), parameter_error);
}

TEST_CASE("parameter validation") {
  DynamicsParams p;
  CHECK_NOTHROW(p.validate());
  p.lambda_int = -1;
  CHECK_THROWS_AS(p.validate(), parameter_error);
  p = {};
  p.steps = 0;
  CHECK_THROWS_AS(p.validate(), parameter_error);
  p = {};
  p.regularization.mode = RegularizationMode::sigmoid;
  CHECK_THROWS_AS(p.validate(), parameter_error);
  p.regularization.nu_max = 1.0;
  CHECK_NOTHROW(p.validate());
  p.regularization.nu_max = -1.0;
  CHECK_THROWS_AS(p.validate(), parameter_error);
  CHECK_THROWS_AS(parse_production_model("gaussian"), parameter_error);
  CHECK(parse_production_model("poisson") == ProductionModel::poisson);
  CHECK(parse_regularization_mode(to_string(RegularizationMode::hard_cap)) ==
        RegularizationMode::hard_cap);
  CHECK(parse_boost_target("total") == BoostTarget::total);
}

TEST_CASE("first step from zero content") {
  const Graph g = generate_watts_strogatz({200, 10, 0.2, 1});
  std::vector<std::uint8_t> mask(200, 0);
  mask[3] = mask[77] = 1;
  DynamicsParams params;
  params.lambda_int = 1.5;
  params.delta_lambda = 0.4;
  for (BoostTarget boost : {BoostTarget::intrinsic, BoostTarget::total}) {
    params.boost = boost;
    const ContentState s1 = step(g, ContentState::zeros(200), params, mask);
    CHECK(s1.t == 1);
    for (NodeId i = 0; i < 200; ++i)
      CHECK(s1.values[i] == doctest::Approx(mask[i] ? 1.5 * 1.4 : 1.5).epsilon(1e-15));
  }
}

TEST_CASE("boost targets differ once feedback is present") {
  const Graph ring = generate_watts_strogatz({100, 10, 0.0, 0});
  ContentState state{5, std::vector<double>(100, 2.0)};
  DynamicsParams params;
  params.delta_lambda = 0.5;
  params.boost = BoostTarget::intrinsic;
  CHECK(update_node(ring, state.values, params, true, 6, 0) == doctest::Approx(1.5 + 0.2));
  params.boost = BoostTarget::total;
  CHECK(update_node(ring, state.values, params, true, 6, 0) == doctest::Approx(1.2 * 1.5));
  CHECK(update_node(ring, state.values, params, false, 6, 0) == doctest::Approx(1.2));
}

TEST_CASE("lattice trajectory follows the scalar recurrence") {
  const Graph ring = generate_watts_strogatz({10000, 50, 0.0, 0});
  DynamicsParams params;
  const TimeSeries series = simulate(ring, params, GroupPartition::untreated(10000));
  REQUIRE(series.rows.size() == 50);
  CHECK_FALSE(series.diverged);
  for (const auto& row : series.rows) {
    const double expected = (1.0 - std::pow(0.5, row.t)) / 0.5;
    CHECK(std::abs(row.all - expected) <= 1e-12);
  }
  CHECK(std::abs(window_mean(series, 10).all - 2.0) < 1e-9);
}

TEST_CASE("marginal stability grows linearly") {
  const Graph ring = generate_watts_strogatz({1000, 100, 0.0, 0});
  DynamicsParams params;
  params.steps = 100;
  const TimeSeries series = simulate(ring, params, GroupPartition::untreated(1000));
  REQUIRE(series.rows.size() == 100);
  CHECK_FALSE(series.diverged);
  for (const auto& row : series.rows) CHECK(row.all == doctest::Approx(row.t).epsilon(1e-13));
}

TEST_CASE("supercritical feedback is flagged divergent") {
  const Graph ring = generate_watts_strogatz({1000, 200, 0.0, 0});
  DynamicsParams params;
  const TimeSeries series = simulate(ring, params, GroupPartition::untreated(1000));
  CHECK(series.diverged);
  CHECK(series.divergence_step > 0);
  CHECK(series.divergence_step <= 50);
  CHECK(series.rows.size() == static_cast<std::size_t>(series.divergence_step));

  ContentState huge{7, std::vector<double>(1000, 1e307)};
  try {
    step(ring, huge, params, {});
    FAIL("expected divergence_error");
  } catch (const divergence_error& e) {
    CHECK(e.step() == 8);
  }
}

TEST_CASE("subcritical runs settle") {
  const Graph g = generate_watts_strogatz({3000, 30, 0.3, 4});
  DynamicsParams params;
  params.steps = 80;
  const TimeSeries series = simulate(g, params, GroupPartition::untreated(3000));
  CHECK_FALSE(series.diverged);
  CHECK(std::abs(series.rows.back().all - series.rows[series.rows.size() - 2].all) < 1e-9);
}

TEST_CASE("single step reproduces the initial production") {
  const Graph g = generate_watts_strogatz({500, 10, 0.1, 2});
  DynamicsParams params;
  params.steps = 1;
  params.lambda_int = 0.7;
  const TimeSeries s = simulate(g, params, GroupPartition::untreated(500));
  REQUIRE(s.rows.size() == 1);
  CHECK(s.rows[0].all == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("updates are simultaneous: node order does not matter") {
  const Graph g = generate_watts_strogatz({800, 12, 0.3, 6});
  const auto part = partition_by_treatment(g, NodeSet{1, 50, 400, 401, 799});
  const auto mask = membership_mask(800, part.treatment);
  for (ProductionModel model :
       {ProductionModel::constant, ProductionModel::uniform, ProductionModel::poisson}) {
    DynamicsParams params;
    params.model = model;
    params.delta_lambda = 0.3;
    params.seed = 17;
    ContentState state = ContentState::zeros(800);
    for (int s = 0; s < 5; ++s) state = step(g, state, params, mask);
    const ContentState expected = step(g, state, params, mask);

    std::vector<NodeId> order(800);
    std::iota(order.begin(), order.end(), 0);
    CounterStream rng(derive_key(99, {static_cast<std::uint64_t>(model)}));
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<double> manual(800);
    for (NodeId i : order)
      manual[i] = update_node(g, state.values, params, mask[i] != 0, state.t + 1, i);
    CHECK(manual == expected.values);
  }
}

TEST_CASE("results do not depend on the thread count") {
  const Graph g = generate_watts_strogatz({5000, 20, 0.2, 3});
  DynamicsParams params;
  params.model = ProductionModel::poisson;
  params.seed = 5;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto one = steady_values(g, params);
  omp_set_num_threads(4);
  const auto four = steady_values(g, params);
  omp_set_num_threads(saved);
  CHECK(one == four);
}

TEST_CASE("stochastic production has the configured mean") {
  // Isolated draws: a k=2 ring at zero feedback, one step.
  constexpr std::uint32_t kDraws = 1000000;
  const Graph ring = generate_watts_strogatz({kDraws, 2, 0.0, 0});
  DynamicsParams params;
  params.nu_damp = 0.0;

  SUBCASE("uniform") {
    params.model = ProductionModel::uniform;
    params.lambda_int = 3.0;
    const auto v = step(ring, ContentState::zeros(kDraws), params, {}).values;
    const double sigma = 2.0 * 3.0 / std::sqrt(12.0);
    CHECK(std::abs(mean(v) - 3.0) < 3.0 * sigma / std::sqrt(kDraws));
    CHECK(*std::min_element(v.begin(), v.end()) >= 0.0);
    CHECK(*std::max_element(v.begin(), v.end()) < 6.0);
  }
  SUBCASE("poisson") {
    params.model = ProductionModel::poisson;
    for (double lambda : {2.5, 40.0}) {
      CAPTURE(lambda);
      params.lambda_int = lambda;
      const auto v = step(ring, ContentState::zeros(kDraws), params, {}).values;
      const double m = mean(v);
      CHECK(std::abs(m - lambda) < 3.0 * std::sqrt(lambda / kDraws));
      double ss = 0.0;
      for (double x : v) {
        CHECK(x == std::floor(x));
        ss += (x - m) * (x - m);
      }
      CHECK(ss / (kDraws - 1) == doctest::Approx(lambda).epsilon(0.01));
    }
  }
}

TEST_CASE("steady mean is monotone in nu_damp and lambda_int") {
  const Graph g = generate_watts_strogatz({2000, 20, 0.1, 9});
  for (double lambda : {0.5, 1.0, 2.0}) {
    double previous = -1.0;
    for (double nu : {0.0, 0.005, 0.01, 0.015, 0.02, 0.03}) {
      DynamicsParams params;
      params.lambda_int = lambda;
      params.nu_damp = nu;
      const double m = mean(steady_values(g, params));
      CHECK(m > previous);
      previous = m;
    }
  }
  double previous = -1.0;
  for (double lambda : {0.1, 0.5, 1.0, 3.0}) {
    DynamicsParams params;
    params.lambda_int = lambda;
    const double m = mean(steady_values(g, params));
    CHECK(m > previous);
    previous = m;
  }
}

TEST_CASE("hard caps are never exceeded") {
  const Graph ring = generate_watts_strogatz({1000, 200, 0.0, 0});
  DynamicsParams params;
  params.model = ProductionModel::uniform;
  params.regularization = {RegularizationMode::hard_cap, 0.5, 1.4};
  ContentState state = ContentState::zeros(1000);
  for (int s = 0; s < 60; ++s) {
    state = step(ring, state, params, {});
    for (double c : state.values) {
      CHECK(c <= 1.4);
      CHECK(std::isfinite(c));
    }
  }
  params.model = ProductionModel::constant;
  params.regularization = {RegularizationMode::hard_cap, 0.5,
                           std::numeric_limits<double>::infinity()};
  const TimeSeries s = simulate(ring, params, GroupPartition::untreated(1000));
  CHECK_FALSE(s.diverged);
  CHECK(s.rows.back().all == doctest::Approx(1.5));
}

TEST_CASE("sigmoid regularization reaches the fixed point on a lattice") {
  const Graph ring = generate_watts_strogatz({10000, 100, 0.0, 0});
  DynamicsParams params;
  params.regularization.mode = RegularizationMode::sigmoid;
  params.regularization.nu_max = 1.0;
  const TimeSeries s = simulate(ring, params, GroupPartition::untreated(10000));
  CHECK_FALSE(s.diverged);
  CHECK(std::abs(window_mean(s, 10).all - bisect_fixed_point(1.0, 100, 0.01, 1.0)) < 1e-6);
}

TEST_CASE("full treatment on a lattice matches the boosted closed form") {
  const Graph ring = generate_watts_strogatz({2000, 10, 0.0, 0});
  NodeSet all(2000);
  std::iota(all.begin(), all.end(), 0);
  const auto part = partition_by_treatment(ring, all);
  for (BoostTarget boost : {BoostTarget::intrinsic, BoostTarget::total}) {
    DynamicsParams params;
    params.delta_lambda = 0.5;
    params.boost = boost;
    const TimeSeries s = simulate(ring, params, part);
    CHECK(std::abs(window_mean(s, 10).treatment - analytic_c_full(1.0, 10, 0.01, 0.5, boost)) <
          1e-9);
    CHECK(std::isnan(s.rows.back().control));
  }
}

TEST_CASE("window mean") {
  TimeSeries s;
  for (int t = 1; t <= 5; ++t) s.rows.push_back({t, double(t), 0, 0, 0, 0});
  CHECK(window_mean(s, 2).all == doctest::Approx(4.5));
  CHECK(window_mean(s, 2).t == 5);
  CHECK_THROWS_AS(window_mean(s, 6), parameter_error);
  CHECK_THROWS_AS(window_mean(s, 0), parameter_error);
}
