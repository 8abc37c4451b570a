// nsa: command-line front end for noisy simulated annealing experiments.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nsa/cost_model.hpp"
#include "nsa/diagnostics.hpp"
#include "nsa/engine.hpp"
#include "nsa/experiment.hpp"
#include "nsa/landscape.hpp"
#include "nsa/problems.hpp"
#include "nsa/schedule.hpp"
#include "nsa/state_space.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Overrides shared by run, check and landscape.
struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> problem;
  std::optional<double> noise_sd;
  std::optional<std::string> schedule;
  std::optional<double> alpha;
  std::optional<double> b;
  std::optional<double> d;
  std::optional<std::size_t> replicates;
  std::optional<double> horizon;
  std::optional<std::uint64_t> max_evals;
};

void add_config_flags(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON config (plain, matrix or manifest)");
  app->add_option("--seed", o.seed, "master seed (NSA_SEED overrides)");
  app->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--problem", o.problem, "benchmark problem")
      ->check(CLI::IsMember({"hajek", "ackley1d", "aircraft"}));
  app->add_option("--noise-sd", o.noise_sd, "Gaussian noise standard deviation")->check(CLI::NonNegativeNumber);
  app->add_option("--schedule", o.schedule, "sampling preset or auto")
      ->check(CLI::IsMember({"none", "linear", "quadratic", "log", "auto"}));
  app->add_option("--alpha", o.alpha, "sampling exponent")->check(CLI::NonNegativeNumber);
  app->add_option("--b", o.b, "cooling slope")->check(CLI::PositiveNumber);
  app->add_option("--d", o.d, "time scale")->check(CLI::PositiveNumber);
  app->add_option("--replicates", o.replicates, "independent chains K")->check(CLI::PositiveNumber);
  auto* h = app->add_option("--horizon", o.horizon, "stop at process time T")->check(CLI::PositiveNumber);
  auto* e = app->add_option("--max-evals", o.max_evals, "stop after this many oracle calls");
  h->excludes(e);
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("NSA_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used, 10);
    if (used != std::string(s).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw nsa::ConfigError("NSA_SEED", "not an unsigned 64-bit integer: " + std::string(s));
  }
}

// Applies command-line overrides to a plain config object.
void apply(json& cfg, const Overrides& o) {
  if (!cfg.is_object()) cfg = json::object();
  if (o.problem) {
    json p = cfg.value("problem", json::object());
    if (p.is_string()) p = json::object();
    p["name"] = *o.problem;
    cfg["problem"] = p;
  }
  if (o.noise_sd) {
    std::string kind = "gaussian";
    if (cfg.contains("noise") && cfg["noise"].is_object()) kind = cfg["noise"].value("kind", "gaussian");
    if (kind == "none") kind = "gaussian";
    cfg["noise"] = {{"kind", kind}, {"param", *o.noise_sd}};
  }
  json s = cfg.value("schedule", json::object());
  if (s.is_string()) {
    json tmp = json::object();
    nsa::apply_sampling_preset(tmp, s.get<std::string>());
    s = tmp;
  }
  if (o.schedule) {
    if (*o.schedule == "auto") s["auto"] = json::object();
    else nsa::apply_sampling_preset(s, *o.schedule);
  }
  if (o.b) {
    s["b"] = *o.b;
    s.erase("auto");
  }
  if (o.alpha) s["alpha"] = *o.alpha;
  if (o.d) s["d"] = *o.d;
  if (!s.empty()) cfg["schedule"] = s;
  if (o.replicates) cfg["replicates"] = *o.replicates;
  if (o.horizon) cfg["stop"] = {{"kind", "horizon"}, {"budget", *o.horizon}};
  if (o.max_evals) cfg["stop"] = {{"kind", "max_evals"}, {"budget", static_cast<double>(*o.max_evals)}};
  if (o.seed) cfg["seed"] = *o.seed;
  if (const auto env = env_seed()) cfg["seed"] = *env;
  if (o.workers) cfg["workers"] = *o.workers;
}

json load_document(const Overrides& o) {
  json doc = o.config.empty() ? json::object() : nsa::load_json_file(o.config);
  if (!doc.is_object()) throw nsa::ConfigError("/", "config must be a JSON object");
  if (doc.contains("matrix")) {
    json base = doc.value("base", json::object());
    apply(base, o);
    doc["base"] = base;
  } else if (doc.contains("config") && doc.contains("version")) {
    apply(doc["config"], o);
  } else {
    apply(doc, o);
  }
  return doc;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_run(const Overrides& o, const std::string& out_dir) {
  const auto cells = nsa::expand_matrix(load_document(o));
  for (const auto& cell : cells) {
    const fs::path dir = cell.name.empty() ? fs::path(out_dir) : fs::path(out_dir) / cell.name;
    const auto res = nsa::run_experiment(cell.config);
    nsa::write_bundle(res, dir);
    const std::size_t K = res.ensemble.traces.size();
    std::cout << (cell.name.empty() ? dir.string() : cell.name) << ": success "
              << res.final_hits << "/" << K << " [" << std::setprecision(3) << res.final_interval.lo << ", "
              << res.final_interval.hi << "], mean evals " << std::setprecision(6) << res.mean_evals << '\n';
  }
  if (cells.size() > 1) nsa::write_summary_table(std::cout, nsa::analyze(out_dir));
  return 0;
}

int cmd_analyze(const std::string& root, const std::string& csv_path, double level) {
  const auto rows = nsa::analyze(root, level);
  nsa::write_summary_table(std::cout, rows);
  if (!csv_path.empty()) {
    std::ostringstream csv;
    nsa::write_summary_csv(csv, rows);
    write_text(csv_path, csv.str());
  }
  return 0;
}

// One diagnostic result row.
struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
};

std::vector<Check> diagnostics_suite(std::uint64_t seed, const std::optional<nsa::ExperimentConfig>& config) {
  std::vector<Check> out;

  {  // Fixed-temperature occupation on two states.
    const auto space = nsa::uniform_space({{1}, {0}});
    const std::vector<double> J = {0.0, 1.0};
    nsa::Rng rng = nsa::Rng::stream(seed, 1);
    const auto tr = nsa::run_classical_sa(space, J, nsa::Cooling::frozen(std::numbers::ln2),
                                          nsa::StopRule::iterations(100000), rng);
    const nsa::Trace traces[] = {tr};
    const double tv = nsa::stationarity_distance(traces, space, J, std::numbers::ln2);
    out.push_back({"stationarity_two_state", tv, 0.02, tv <= 0.02});
  }
  {  // Poisson lower tail at n = 50, delta = 0.5.
    nsa::Rng rng = nsa::Rng::stream(seed, 2);
    const double n = 50.0;
    const int draws = 100000;
    int low = 0;
    for (int i = 0; i < draws; ++i) low += static_cast<double>(nsa::poisson(n, rng)) <= 0.5 * n ? 1 : 0;
    const double p = static_cast<double>(low) / draws;
    const double bound = std::exp(-nsa::poisson_tail_constant(0.5) * n);
    const double limit = bound + 3.0 * std::sqrt(bound * (1.0 - bound) / draws);
    out.push_back({"poisson_tail_n50", p, limit, p <= limit});
  }
  {  // Sandwich with bounded noise along an optimal schedule.
    const auto oracle = nsa::bounded_noise_oracle({1.0, 1.5}, 1.0);
    nsa::ScheduleParams sp;
    const auto opt = nsa::optimal_params(1.0, 0.5, 0.01);
    sp.b = opt.b;
    sp.alpha = opt.alpha;
    nsa::Rng rng = nsa::Rng::stream(seed, 3);
    for (double t : {10.0, 100.0}) {
      const auto r = nsa::acceptance_sandwich(oracle, 0, 1, nsa::beta_at(sp, t), nsa::n_at(sp, t), 0.5, 20000, rng);
      out.push_back({"sandwich_t" + std::to_string(static_cast<int>(t)), r.ratio, r.upper, r.pass});
    }
  }
  if (config) {
    const auto problem = nsa::build_problem(config->problem, config->noise);
    const auto report = nsa::validate_space(problem.space);
    out.push_back({"space_valid", static_cast<double>(report.violations.size()), 0.0, report.ok()});
    const double m = nsa::m_star(problem.space, problem.exact_J);
    out.push_back({"declared_m_star", problem.meta.m_star, m, problem.meta.m_star == m});
    const auto res = nsa::run_experiment(*config);
    if (res.budget)
      out.push_back({"budget_bound", res.budget->mean_batch_sum, res.budget->bound, res.budget->pass});
  } else {  // Default budget scenario: alpha = 2, d = 1, T = 5.
    nsa::ScheduleParams sp;
    sp.b = 1.0;
    sp.d = 1.0;
    sp.alpha = 2.0;
    const auto p = nsa::hajek_problem(9, 1.0, {nsa::NoiseKind::gaussian, 1.0});
    nsa::EnsembleOptions opts;
    opts.replicates = 200;
    opts.seed = seed;
    const auto ens = nsa::run_replicates(p.space, p.oracle, nsa::Cooling::from(sp), {},
                                         nsa::StopRule::horizon(5.0), opts);
    const auto b = nsa::budget_check(ens.traces, sp, 5.0);
    out.push_back({"budget_bound", b.mean_batch_sum, b.bound, b.pass});
  }
  return out;
}

int cmd_check(const Overrides& o, const std::string& out_dir) {
  std::optional<nsa::ExperimentConfig> config;
  std::uint64_t seed = o.seed.value_or(1);
  if (const auto env = env_seed()) seed = *env;
  if (!o.config.empty() || o.problem) {
    const auto cells = nsa::expand_matrix(load_document(o));
    if (cells.size() != 1) throw nsa::ConfigError("/matrix", "check takes a single-cell config");
    config = cells.front().config;
    seed = config->seed;
  }
  const auto checks = diagnostics_suite(seed, config);
  bool ok = true;
  json doc = json::array();
  std::ostringstream csv;
  csv << "check,value,limit,pass\n" << std::setprecision(12);
  for (const auto& c : checks) {
    ok = ok && c.pass;
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  value=" << c.value << " limit=" << c.limit << '\n';
    doc.push_back({{"check", c.name}, {"value", c.value}, {"limit", c.limit}, {"pass", c.pass}});
    csv << c.name << ',' << c.value << ',' << c.limit << ',' << (c.pass ? 1 : 0) << '\n';
  }
  if (!out_dir.empty()) {
    write_text(fs::path(out_dir) / "check.json", json({{"seed", seed}, {"checks", doc}, {"pass", ok}}).dump(2) + "\n");
    write_text(fs::path(out_dir) / "check.csv", csv.str());
  }
  return ok ? 0 : 1;
}

int cmd_landscape(const Overrides& o, const std::string& out_path, const std::string& dump_path,
                  std::vector<double> epsilons, std::vector<double> betas) {
  Overrides lo = o;
  if (lo.config.empty() && !lo.problem) lo.problem = "hajek";
  const auto cells = nsa::expand_matrix(load_document(lo));
  const auto& cfg = cells.front().config;
  const auto problem = nsa::build_problem(cfg.problem, cfg.noise);
  const auto report = nsa::analyze_landscape(problem.space, problem.exact_J, epsilons, betas);
  const std::string text = nsa::landscape_to_json(report).dump(2) + "\n";
  if (out_path.empty()) std::cout << text;
  else write_text(out_path, text);
  if (!dump_path.empty()) write_text(dump_path, nsa::problem_to_json(problem).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy simulated annealing experiments"};
  app.set_version_flag("--version", nsa::library_version());
  app.require_subcommand(1);

  Overrides run_o, check_o, land_o;
  std::string run_out = "results", check_out, land_out, land_dump, analyze_root, analyze_csv;
  double analyze_level = 0.01;
  std::vector<double> epsilons = {0.5}, betas;

  auto* run = app.add_subcommand("run", "run an experiment or a study matrix");
  add_config_flags(run, run_o);
  run->add_option("--out", run_out, "output directory")->capture_default_str();

  auto* analyze = app.add_subcommand("analyze", "summarize result bundles");
  analyze->add_option("dir", analyze_root, "bundle or directory of bundles")->required();
  analyze->add_option("--csv", analyze_csv, "also write the summary as CSV");
  analyze->add_option("--level", analyze_level, "two-sided test level")->check(CLI::Range(0.0, 1.0));

  auto* check = app.add_subcommand("check", "run the diagnostics suite; exit 1 on failure");
  add_config_flags(check, check_o);
  check->add_option("--out", check_out, "directory for check.json and check.csv");

  auto* land = app.add_subcommand("landscape", "emit the landscape report");
  add_config_flags(land, land_o);
  land->add_option("--out", land_out, "report path (default stdout)");
  land->add_option("--dump", land_dump, "write the problem's space and cost table");
  land->add_option("--epsilon", epsilons, "epsilon levels")->delimiter(',');
  land->add_option("--beta", betas, "inverse temperatures for spectral gaps")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(run_o, run_out);
    if (*analyze) return cmd_analyze(analyze_root, analyze_csv, analyze_level);
    if (*check) return cmd_check(check_o, check_out);
    if (*land) return cmd_landscape(land_o, land_out, land_dump, epsilons, betas);
  } catch (const nsa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
