#pragma once

// The four CLI commands. Each writes its files under config.out_dir and
// returns the paths written, in order; `log` receives a short human summary.

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "netrct/scenario.hpp"

namespace netrct {

using WrittenFiles = std::vector<std::filesystem::path>;

/// <name>.edges (one per p when a p-sweep is configured), <name>_degrees.csv,
/// and <name>_treatment.csv when an assignment is present.
WrittenFiles cmd_generate(const ScenarioConfig& config, std::ostream& log);

/// Per model: <name>_<model>.csv, _final.csv, _by_degree.csv; then <name>_summary.csv.
WrittenFiles cmd_simulate(const ScenarioConfig& config, std::ostream& log);

/// Per model: <name>_<model>_report.json, _series.csv, _baseline.csv.
WrittenFiles cmd_experiment(const ScenarioConfig& config, std::ostream& log);

/// <name>_sweep.csv.
WrittenFiles cmd_sweep(const ScenarioConfig& config, std::ostream& log);

}  // namespace netrct
