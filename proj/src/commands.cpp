#include "netrct/commands.hpp"

#include <fstream>
#include <ostream>
#include <string>

#include "netrct/errors.hpp"
#include "netrct/io.hpp"

namespace netrct {

namespace {

namespace fs = std::filesystem;

template <typename Fn>
void write_file(const fs::path& path, WrittenFiles& written, Fn&& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  body(out);
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
  written.push_back(path);
}

fs::path output_path(const ScenarioConfig& cfg, const std::string& suffix) {
  fs::create_directories(cfg.out_dir);
  return cfg.out_dir / (cfg.name + suffix);
}

std::string model_suffix(ProductionModel m) { return "_" + std::string(to_string(m)); }

void summarize_degrees(std::ostream& log, const Graph& g, double p) {
  const auto hist = degree_histogram(g);
  log << "p=" << format_number(p) << " nodes=" << g.node_count() << " edges=" << g.edge_count()
      << " degree min=" << hist.begin()->first << " max=" << hist.rbegin()->first
      << " mean=" << format_number(2.0 * g.edge_count() / g.node_count()) << '\n';
}

}  // namespace

WrittenFiles cmd_generate(const ScenarioConfig& cfg, std::ostream& log) {
  cfg.validate();
  WrittenFiles written;
  std::vector<double> ps{cfg.graph.p};
  const bool per_p = cfg.sweep && cfg.sweep->kind == SweepKind::p;
  if (per_p) ps = cfg.sweep->ps;

  std::vector<LabelledHistogram> hists;
  for (double p : ps) {
    WattsStrogatzParams params = cfg.graph;
    params.p = p;
    const Graph g = generate_watts_strogatz(params);
    summarize_degrees(log, g, p);
    hists.push_back({p, degree_histogram(g)});
    const std::string suffix = per_p ? "_p" + format_number(p) + ".edges" : ".edges";
    write_file(output_path(cfg, suffix), written, [&](std::ostream& os) {
      write_edge_list(os, g, params);
    });
    if (cfg.assignment && !per_p) {
      const NodeSet treatment =
          assign(g, {cfg.assignment->strategy, cfg.assignment->resolve(cfg.graph.n),
                     cfg.assignment->seed});
      write_file(output_path(cfg, "_treatment.csv"), written, [&](std::ostream& os) {
        os << "node\n";
        for (NodeId i : treatment) os << i << '\n';
      });
    }
  }
  write_file(output_path(cfg, "_degrees.csv"), written,
             [&](std::ostream& os) { write_degree_histograms_csv(os, hists); });
  return written;
}

WrittenFiles cmd_simulate(const ScenarioConfig& cfg, std::ostream& log) {
  cfg.validate();
  WrittenFiles written;
  const Graph g = generate_watts_strogatz(cfg.graph);
  GroupPartition groups = GroupPartition::untreated(g.node_count());
  if (cfg.assignment) {
    groups = partition_by_treatment(
        g, assign(g, {cfg.assignment->strategy, cfg.assignment->resolve(cfg.graph.n),
                      cfg.assignment->seed}));
  }

  struct Outcome {
    ProductionModel model;
    TimeSeries series;
  };
  std::vector<Outcome> outcomes;
  for (ProductionModel model : cfg.models) {
    DynamicsParams params = cfg.dynamics;
    params.model = model;
    TimeSeries series = simulate(g, params, groups);
    const std::string suffix = model_suffix(model);
    write_file(output_path(cfg, suffix + ".csv"), written, [&](std::ostream& os) {
      write_time_series_csv(os, series);
    });
    write_file(output_path(cfg, suffix + "_final.csv"), written, [&](std::ostream& os) {
      write_final_state_csv(os, g, series.final_values);
    });
    write_file(output_path(cfg, suffix + "_by_degree.csv"), written, [&](std::ostream& os) {
      write_content_by_degree_csv(os, content_by_degree(g, series.final_values));
    });
    log << to_string(model) << ": "
        << (series.diverged ? "divergent at step " + std::to_string(series.divergence_step)
                            : "converged")
        << ", last mean " << format_number(series.rows.empty() ? 0.0 : series.rows.back().all)
        << '\n';
    outcomes.push_back({model, std::move(series)});
  }

  write_file(output_path(cfg, "_summary.csv"), written, [&](std::ostream& os) {
    os << "model,status,steps_completed,divergence_step,final_mean_all\n";
    for (const auto& o : outcomes) {
      const auto& s = o.series;
      os << to_string(o.model) << ',' << (s.diverged ? "divergent" : "converged") << ','
         << s.rows.size() << ',' << (s.diverged ? std::to_string(s.divergence_step) : "") << ','
         << format_number(s.rows.empty() ? 0.0 : s.rows.back().all) << '\n';
    }
  });
  return written;
}

WrittenFiles cmd_experiment(const ScenarioConfig& cfg, std::ostream& log) {
  cfg.validate();
  if (!cfg.assignment) throw parameter_error("experiment needs an 'assignment' section");
  WrittenFiles written;
  const Graph g = generate_watts_strogatz(cfg.graph);
  for (ProductionModel model : cfg.models) {
    const ExperimentConfig exp = cfg.experiment(model);
    const ExperimentRun run = run_experiment(g, exp);
    const std::string suffix = model_suffix(model);
    write_file(output_path(cfg, suffix + "_report.json"), written, [&](std::ostream& os) {
      os << report_to_json(run.report, exp).dump(2) << '\n';
    });
    write_file(output_path(cfg, suffix + "_series.csv"), written, [&](std::ostream& os) {
      write_time_series_csv(os, run.treated);
    });
    write_file(output_path(cfg, suffix + "_baseline.csv"), written, [&](std::ostream& os) {
      write_time_series_csv(os, run.baseline);
    });
    const auto& r = run.report;
    log << to_string(model) << ": "
        << (r.diverged ? "divergent" : "c_base'=" + format_number(r.c_base_prime) +
                                           " e_spillover=" + format_number(r.e_spillover) +
                                           " e_treatment=" + format_number(r.e_treatment) +
                                           " e_dampening=" + format_number(r.e_dampening) +
                                           " e_intrinsic=" + format_number(r.e_intrinsic))
        << '\n';
  }
  return written;
}

WrittenFiles cmd_sweep(const ScenarioConfig& cfg, std::ostream& log) {
  cfg.validate();
  if (!cfg.sweep) throw parameter_error("sweep needs a 'sweep' section");
  const SweepSpec& sweep = *cfg.sweep;
  SweepResult result;
  if (sweep.kind == SweepKind::size) {
    ExperimentConfig base;
    base.graph = cfg.graph;
    base.dynamics = cfg.dynamics;
    base.window = cfg.window;
    base.allow_unstable = cfg.allow_unstable;
    base.assignment.seed = cfg.assignment ? cfg.assignment->seed : 0;
    result = run_size_sweep(base, sweep.fractions, sweep.ks, sweep.replications);
  } else {
    result = run_p_sweep(cfg.graph, cfg.dynamics, cfg.window, sweep.ps, sweep.replications);
  }
  WrittenFiles written;
  write_file(output_path(cfg, "_sweep.csv"), written,
             [&](std::ostream& os) { write_sweep_csv(os, result); });
  std::size_t ok = 0;
  for (const auto& pt : result.points) ok += pt.status == "ok";
  log << result.points.size() << " grid points, " << ok << " ok\n";
  return written;
}

}  // namespace netrct
