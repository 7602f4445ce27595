#pragma once

// CSV and JSON emitters. Numbers are written with 12 significant digits;
// non-finite or not-applicable values are written as empty CSV fields and
// JSON nulls.

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "netrct/dynamics.hpp"
#include "netrct/experiments.hpp"
#include "netrct/graph.hpp"

namespace netrct {

inline constexpr const char* kTimeSeriesHeader =
    "t,mean_all,mean_treatment,mean_neighbours,mean_rest,mean_control";

std::string format_number(double value);

void write_time_series_csv(std::ostream& out, const TimeSeries& series);

/// node,degree,content for the final step.
void write_final_state_csv(std::ostream& out, const Graph& g, std::span<const double> values);

/// degree,count,mean_content
void write_content_by_degree_csv(std::ostream& out,
                                 const std::map<std::size_t, DegreeBucket>& buckets);

struct LabelledHistogram {
  double p = 0.0;
  DegreeHistogram histogram;
};

/// p,degree,count
void write_degree_histograms_csv(std::ostream& out, std::span<const LabelledHistogram> hists);

/// Every report field plus the configuration that produced it.
nlohmann::ordered_json report_to_json(const EffectReport& report, const ExperimentConfig& config);

/// Column names of the sweep CSV, in order.
std::vector<std::string> sweep_csv_columns();

void write_sweep_csv(std::ostream& out, const SweepResult& result);

}  // namespace netrct
