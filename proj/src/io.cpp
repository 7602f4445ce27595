#include "netrct/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace netrct {

namespace {

nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json group_json(const GroupStats& g) {
  return {{"size", g.size},
          {"content", number_or_null(g.content)},
          {"mean_degree", number_or_null(g.mean_degree)}};
}

}  // namespace

std::string format_number(double value) {
  if (!std::isfinite(value)) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

void write_time_series_csv(std::ostream& out, const TimeSeries& series) {
  out << kTimeSeriesHeader << '\n';
  for (const auto& r : series.rows) {
    out << r.t << ',' << format_number(r.all) << ',' << format_number(r.treatment) << ','
        << format_number(r.neighbours) << ',' << format_number(r.rest) << ','
        << format_number(r.control) << '\n';
  }
}

void write_final_state_csv(std::ostream& out, const Graph& g, std::span<const double> values) {
  out << "node,degree,content\n";
  for (NodeId i = 0; i < values.size(); ++i)
    out << i << ',' << g.degree(i) << ',' << format_number(values[i]) << '\n';
}

void write_content_by_degree_csv(std::ostream& out,
                                 const std::map<std::size_t, DegreeBucket>& buckets) {
  out << "degree,count,mean_content\n";
  for (const auto& [degree, b] : buckets)
    out << degree << ',' << b.count << ',' << format_number(b.mean_content) << '\n';
}

void write_degree_histograms_csv(std::ostream& out, std::span<const LabelledHistogram> hists) {
  out << "p,degree,count\n";
  for (const auto& h : hists) {
    const std::string p = format_number(h.p);
    for (const auto& [degree, count] : h.histogram) out << p << ',' << degree << ',' << count << '\n';
  }
}

nlohmann::ordered_json report_to_json(const EffectReport& r, const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["config"] = {
      {"graph", {{"n", c.graph.n}, {"k", c.graph.k}, {"p", c.graph.p}, {"seed", c.graph.seed}}},
      {"dynamics",
       {{"lambda_int", c.dynamics.lambda_int},
        {"nu_damp", c.dynamics.nu_damp},
        {"delta_lambda", c.dynamics.delta_lambda},
        {"model", to_string(c.dynamics.model)},
        {"boost", to_string(c.dynamics.boost)},
        {"regularization",
         {{"mode", to_string(c.dynamics.regularization.mode)},
          {"nu_max", number_or_null(c.dynamics.regularization.nu_max)},
          {"c_max", number_or_null(c.dynamics.regularization.c_max)}}},
        {"steps", c.dynamics.steps},
        {"seed", c.dynamics.seed}}},
      {"assignment",
       {{"strategy", to_string(c.assignment.strategy)},
        {"size", c.assignment.size},
        {"seed", c.assignment.seed}}},
      {"steady_state", {{"burn_in", c.window.burn_in}, {"window", c.window.window}}}};
  j["diverged"] = r.diverged;
  j["divergence_step"] = r.divergence_step;
  j["delta_lambda"] = r.delta_lambda;
  j["c_base"] = number_or_null(r.c_base);
  j["c_base_prime"] = number_or_null(r.c_base_prime);
  j["groups"] = {{"treatment", group_json(r.treatment)},
                 {"control", group_json(r.control)},
                 {"neighbours", group_json(r.neighbours)},
                 {"rest", group_json(r.rest)}};
  j["within_treatment_edge_fraction"] = number_or_null(r.within_treatment_edge_fraction);
  j["neighbour_overlap_fraction"] = number_or_null(r.neighbour_overlap_fraction);
  j["metrics"] = {{"e_degree_distribution", number_or_null(r.e_degree_distribution)},
                  {"e_spillover", number_or_null(r.e_spillover)},
                  {"e_treatment", number_or_null(r.e_treatment)},
                  {"e_dampening", number_or_null(r.e_dampening)},
                  {"e_intrinsic", number_or_null(r.e_intrinsic)}};
  return j;
}

std::vector<std::string> sweep_csv_columns() {
  return {"k",
          "p",
          "n",
          "N",
          "frac",
          "delta_lambda",
          "c_base_prime",
          "c_treatment",
          "c_control",
          "c_neighbours",
          "c_rest",
          "e_spillover",
          "e_treatment",
          "e_dampening",
          "e_intrinsic",
          "stddev_c_base_prime",
          "stddev_c_treatment",
          "stddev_c_control",
          "stddev_c_neighbours",
          "stddev_c_rest",
          "stddev_e_spillover",
          "stddev_e_treatment",
          "stddev_e_dampening",
          "stddev_e_intrinsic",
          "e_degree_distribution",
          "stddev_e_degree_distribution",
          "replications",
          "status"};
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  const auto columns = sweep_csv_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& pt : result.points) {
    const Summary* means[] = {&pt.c_base_prime, &pt.c_treatment, &pt.c_control,
                              &pt.c_neighbours, &pt.c_rest,      &pt.e_spillover,
                              &pt.e_treatment,  &pt.e_dampening, &pt.e_intrinsic};
    out << pt.k << ',' << format_number(pt.p) << ',' << pt.n << ',' << pt.size << ','
        << format_number(pt.fraction) << ',' << format_number(pt.delta_lambda);
    for (const Summary* s : means) out << ',' << format_number(s->mean);
    for (const Summary* s : means) out << ',' << format_number(s->stddev);
    out << ',' << format_number(pt.e_degree_distribution.mean) << ','
        << format_number(pt.e_degree_distribution.stddev) << ',' << pt.replications << ','
        << pt.status << '\n';
  }
}

}  // namespace netrct
