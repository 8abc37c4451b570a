#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsa/cost_model.hpp"
#include "nsa/diagnostics.hpp"
#include "nsa/engine.hpp"
#include "nsa/problems.hpp"
#include "nsa/schedule.hpp"

namespace nsa {

// Thrown for malformed configs. `where` is a JSON pointer or "line:col".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct ProblemSpec {
  std::string name = "hajek";  // hajek | ackley1d | aircraft | table
  std::size_t n_states = 21;
  double well_depth = 1.0;
  std::size_t grid_points = 2000;
  AircraftOptions aircraft;
  // name == "table": explicit space document and cost table.
  nlohmann::json space;
  nlohmann::json cost;
};

struct ExperimentConfig {
  ProblemSpec problem;
  NoiseSpec noise;
  nlohmann::json schedule = nlohmann::json::object();  // as written; resolved per problem
  EngineSpec engine;
  std::size_t replicates = 16;
  StopRule stop = StopRule::horizon(100.0);
  // nullopt: geometric default grid (horizon rule only). Empty: none.
  std::optional<std::vector<double>> checkpoints;
  double epsilon = 0.5;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  bool record_traces = false;
  std::optional<std::uint64_t> selection_batch;
  // nullopt: replicates draw their start from mu0.
  std::optional<StateIndex> initial_state;
  AcceptanceClock clock = AcceptanceClock::pre_jump;
};

// Schedule presets for the sampling intensity: none (alpha = 0), linear,
// quadratic, log (n_t = log(1 + t d)).
void apply_sampling_preset(nlohmann::json& schedule, const std::string& preset);

ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);

// Parses a config file, reporting syntax errors with line and column.
nlohmann::json load_json_file(const std::filesystem::path& path);

// {"base": {...}, "matrix": {"noise_sd": [...], "schedule": [...]}} expands to
// one config per cell; a plain config yields a single unnamed cell.
struct MatrixCell {
  std::string name;
  ExperimentConfig config;
};
std::vector<MatrixCell> expand_matrix(const nlohmann::json& doc);

BenchmarkProblem build_problem(const ProblemSpec& spec, const NoiseSpec& noise);
ScheduleParams resolve_schedule(const ExperimentConfig& config, const BenchmarkProblem& problem);
std::vector<double> default_checkpoints(double horizon, std::size_t count = 16);

struct ExperimentResult {
  ExperimentConfig config;
  ScheduleParams schedule;
  std::vector<StateIndex> chi;
  EnsembleResult ensemble;
  std::optional<SuccessCurve> curve;
  std::size_t final_hits = 0;
  Interval final_interval;
  double mean_evals = 0.0;
  std::optional<BudgetReport> budget;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// Writes manifest.json, summary.json, final.csv and, when present,
// success.csv, budget.json and traces/replicate_NNNN.csv.
void write_bundle(const ExperimentResult& result, const std::filesystem::path& dir);

struct SummaryRow {
  std::string bundle;
  std::string problem;
  std::string engine;
  double noise = 0.0;
  std::string schedule;
  double alpha = 0.0;
  std::size_t replicates = 0;
  std::size_t hits = 0;
  double success = 0.0;
  Interval interval;
  double mean_evals = 0.0;
  std::optional<double> budget_margin;
  bool flagged = false;
  double z = 0.0;
};

// Scans `root` (a bundle or a directory of bundles). Rows are sorted by
// (noise, schedule); within each (problem, engine, noise) group, rows whose
// success differs from the quadratic-schedule row at two-sided level
// `level` are flagged.
std::vector<SummaryRow> analyze(const std::filesystem::path& root, double level = 0.01);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_summary_table(std::ostream& out, const std::vector<SummaryRow>& rows);

std::string library_version();

}  // namespace nsa
