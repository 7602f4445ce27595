#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "netrct/commands.hpp"
#include "netrct/errors.hpp"
#include "netrct/io.hpp"
#include "netrct/scenario.hpp"

using namespace netrct;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

json small_doc() {
  return json::parse(R"({
    "name": "small",
    "graph": {"n": 600, "k": 10, "p": 0.2, "seed": 4},
    "dynamics": {"delta_lambda": 0.1, "models": ["constant", "poisson"], "seed": 5},
    "assignment": {"strategy": "random", "fraction": 0.05, "seed": 6}
  })");
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("netrct_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("scenario parsing") {
  const ScenarioConfig cfg = parse_scenario(small_doc());
  CHECK(cfg.name == "small");
  CHECK(cfg.graph.n == 600);
  CHECK(cfg.models.size() == 2);
  CHECK(cfg.dynamics.model == ProductionModel::constant);
  CHECK(cfg.dynamics.nu_damp == 0.01);
  REQUIRE(cfg.assignment);
  CHECK(cfg.assignment->resolve(600) == 30);
  CHECK(cfg.experiment(ProductionModel::poisson).dynamics.model == ProductionModel::poisson);
  CHECK(cfg.experiment(ProductionModel::poisson).assignment.size == 30);
  CHECK(cfg.window.burn_in == 20);
  CHECK(cfg.out_dir == "out");
}

TEST_CASE("scenario parsing rejects bad input") {
  auto rejects = [](const json& doc) {
    CHECK_THROWS_AS(parse_scenario(doc), parameter_error);
  };
  json doc = small_doc();
  doc["colour"] = "blue";
  rejects(doc);

  doc = small_doc();
  doc["graph"]["degree"] = 4;
  rejects(doc);

  doc = small_doc();
  doc["dynamics"]["regularization"] = {{"mode", "sigmoid"}, {"cap", 1}};
  rejects(doc);

  doc = small_doc();
  doc.erase("graph");
  rejects(doc);

  doc = small_doc();
  doc["graph"]["k"] = 7;
  rejects(doc);

  doc = small_doc();
  doc["assignment"]["size"] = 10;
  rejects(doc);

  doc = small_doc();
  doc["dynamics"]["models"] = json::array();
  rejects(doc);

  doc = small_doc();
  doc["dynamics"]["models"] = {"lognormal"};
  rejects(doc);

  doc = small_doc();
  doc["sweep"] = {{"kind", "size"}, {"fractions", json::array()}, {"ks", {10}}};
  rejects(doc);

  doc = small_doc();
  doc["sweep"] = {{"kind", "p"}, {"ps", json::array()}};
  rejects(doc);

  doc = small_doc();
  doc["sweep"] = {{"kind", "size"}, {"fractions", {0.5}}, {"ks", {11}}};
  rejects(doc);

  doc = small_doc();
  doc["steady_state"] = {{"burn_in", 45}, {"window", 10}};
  rejects(doc);

  doc = small_doc();
  doc["graph"]["n"] = "many";
  rejects(doc);
}

TEST_CASE("regularization caps default to unbounded") {
  json doc = small_doc();
  doc["dynamics"]["regularization"] = {{"mode", "sigmoid"}, {"nu_max", 1.0}, {"c_max", nullptr}};
  const auto cfg = parse_scenario(doc);
  CHECK(cfg.dynamics.regularization.nu_max == 1.0);
  CHECK(std::isinf(cfg.dynamics.regularization.c_max));
}

TEST_CASE("overrides") {
  ScenarioConfig cfg = parse_scenario(small_doc());
  ScenarioOverrides o;
  o.k = 20;
  o.seed = 42;
  o.model = "uniform";
  o.frac = 0.1;
  apply_overrides(cfg, o);
  CHECK(cfg.graph.k == 20);
  CHECK(cfg.graph.seed == 42);
  CHECK(cfg.dynamics.seed == 42);
  CHECK(cfg.assignment->seed == 42);
  CHECK(cfg.models == std::vector<ProductionModel>{ProductionModel::uniform});
  CHECK(cfg.assignment->resolve(600) == 60);

  ScenarioOverrides bad;
  bad.k = 9;
  CHECK_THROWS_AS(apply_overrides(cfg, bad), parameter_error);
}

TEST_CASE("bundled scenarios load") {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(NETRCT_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_scenario(entry.path()));
    ++count;
  }
  CHECK(count >= 15);
}

TEST_CASE("number formatting") {
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()).empty());
  CHECK(format_number(std::numeric_limits<double>::infinity()).empty());
}

TEST_CASE("time series CSV") {
  TimeSeries s;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.rows.push_back({1, 1.0, nan, 1.0, 1.0, 1.0});
  s.rows.push_back({2, 1.5, nan, 1.5, 1.25, 1.375});
  std::ostringstream out;
  write_time_series_csv(out, s);
  CHECK(out.str() == std::string(kTimeSeriesHeader) + "\n1,1,,1,1,1\n2,1.5,,1.5,1.25,1.375\n");
}

TEST_CASE("sweep CSV has a fixed column count") {
  ExperimentConfig base;
  base.graph = {800, 10, 0.1, 1};
  base.dynamics.delta_lambda = 0.5;
  const std::vector<double> fractions{0.2, 1.0};
  const std::vector<std::uint32_t> ks{10};
  std::ostringstream out;
  write_sweep_csv(out, run_size_sweep(base, fractions, ks, 1));
  const auto columns = sweep_csv_columns();
  CHECK(columns.front() == "k");
  CHECK(columns.back() == "status");
  std::istringstream in(out.str());
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') + 1 == static_cast<long>(columns.size()));
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("report JSON") {
  ExperimentConfig cfg;
  cfg.graph = {1000, 10, 0.1, 2};
  cfg.assignment = {AssignmentStrategy::clustered, 1000, 0};
  const auto run = run_experiment(cfg);
  const auto j = report_to_json(run.report, cfg);
  CHECK(j.contains("config"));
  CHECK(j.contains("metrics"));
  CHECK(j.contains("groups"));
  CHECK(j.dump().find("NaN") == std::string::npos);
  CHECK(j["metrics"]["e_dampening"].is_null());
  CHECK(j["metrics"]["e_spillover"].is_null());
  CHECK(j["metrics"]["e_intrinsic"].is_number());
}

TEST_CASE("generate writes the expected edge list") {
  json doc = json::parse(R"({"name": "tiny", "graph": {"n": 10, "k": 4, "p": 0.0, "seed": 3}})");
  ScenarioConfig cfg = parse_scenario(doc);
  cfg.out_dir = scratch_dir("generate");
  std::ostringstream log;
  const auto files = cmd_generate(cfg, log);
  REQUIRE(files.size() == 2);
  const std::string edges = slurp(files[0]);
  CHECK(edges.rfind("# n=10 k=4 p=0 seed=3\n", 0) == 0);
  CHECK(std::count(edges.begin(), edges.end(), '\n') == 21);
  CHECK(slurp(files[1]) == "p,degree,count\n0,4,10\n");
  fs::remove_all(cfg.out_dir);
}

TEST_CASE("command output is identical across thread counts") {
  json doc = small_doc();
  doc["dynamics"]["models"] = {"constant", "uniform", "poisson"};
  ScenarioConfig cfg = parse_scenario(doc);
  const int saved = omp_get_max_threads();
  auto run_all = [&](int threads, const std::string& tag) {
    omp_set_num_threads(threads);
    cfg.out_dir = scratch_dir(tag);
    std::ostringstream log;
    WrittenFiles files = cmd_simulate(cfg, log);
    const auto more = cmd_experiment(cfg, log);
    files.insert(files.end(), more.begin(), more.end());
    return files;
  };
  const auto a = run_all(1, "det_a");
  const auto b = run_all(3, "det_b");
  omp_set_num_threads(saved);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CAPTURE(a[i].string());
    CHECK(a[i].filename() == b[i].filename());
    CHECK(slurp(a[i]) == slurp(b[i]));
  }
  fs::remove_all(a.front().parent_path());
  fs::remove_all(b.front().parent_path());
}

TEST_CASE("commands refuse missing sections") {
  ScenarioConfig cfg = parse_scenario(json::parse(R"({"graph": {"n": 100, "k": 4, "p": 0.1}})"));
  std::ostringstream log;
  CHECK_THROWS_AS(cmd_experiment(cfg, log), parameter_error);
  CHECK_THROWS_AS(cmd_sweep(cfg, log), parameter_error);
}
