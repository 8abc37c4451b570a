#include "nsa/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "nsa/landscape.hpp"

#ifndef NSA_VERSION
#define NSA_VERSION "0.0.0"
#endif

namespace nsa {

namespace fs = std::filesystem;
using nlohmann::json;

std::string library_version() { return NSA_VERSION; }

namespace {

template <typename T>
T field(const json& doc, const char* key, const std::string& path, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path + "/" + key, std::string("wrong type: ") + e.what());
  }
}

void require_object(const json& doc, const std::string& path) {
  if (!doc.is_object()) throw ConfigError(path.empty() ? "/" : path, "expected an object");
}

StopRule stop_from_json(const json& doc) {
  require_object(doc, "/stop");
  const auto kind = field<std::string>(doc, "kind", "/stop", "horizon");
  const double budget = field<double>(doc, "budget", "/stop", 100.0);
  StopRule rule;
  if (kind == "horizon") rule = StopRule::horizon(budget);
  else if (kind == "max_iterations") rule = {StopRule::Kind::max_iterations, budget};
  else if (kind == "max_evals") rule = {StopRule::Kind::max_evals, budget};
  else throw ConfigError("/stop/kind", "expected horizon|max_iterations|max_evals, got '" + kind + "'");
  try {
    rule.validate();
  } catch (const std::exception& e) {
    throw ConfigError("/stop/budget", e.what());
  }
  return rule;
}

json stop_to_json(const StopRule& rule) {
  const char* kind = rule.kind == StopRule::Kind::horizon          ? "horizon"
                     : rule.kind == StopRule::Kind::max_iterations ? "max_iterations"
                                                                    : "max_evals";
  return {{"kind", kind}, {"budget", rule.budget}};
}

std::string schedule_label(const ScheduleParams& p) {
  if (p.sampling == SamplingVariant::logarithmic) return "log";
  if (p.alpha == 0.0) return "none";
  if (p.alpha == 1.0) return "linear";
  if (p.alpha == 2.0) return "quadratic";
  std::ostringstream os;
  os << "alpha=" << p.alpha;
  return os.str();
}

int schedule_rank(const std::string& label) {
  static const std::map<std::string, int> rank = {{"none", 0}, {"log", 1}, {"linear", 2}, {"quadratic", 3}};
  const auto it = rank.find(label);
  return it == rank.end() ? 4 : it->second;
}

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

void apply_sampling_preset(json& schedule, const std::string& preset) {
  if (!schedule.is_object()) schedule = json::object();
  if (preset == "none") {
    schedule["sampling"] = "power";
    schedule["alpha"] = 0.0;
  } else if (preset == "linear") {
    schedule["sampling"] = "power";
    schedule["alpha"] = 1.0;
  } else if (preset == "quadratic") {
    schedule["sampling"] = "power";
    schedule["alpha"] = 2.0;
  } else if (preset == "log") {
    schedule["sampling"] = "logarithmic";
  } else {
    throw ConfigError("/schedule", "unknown preset '" + preset + "' (expected none|linear|quadratic|log)");
  }
  schedule.erase("preset");
}

ExperimentConfig config_from_json(const json& raw) {
  const json& doc = (raw.contains("config") && raw.contains("version")) ? raw.at("config") : raw;
  require_object(doc, "");
  ExperimentConfig c;

  if (doc.contains("problem")) {
    const json& p = doc.at("problem");
    if (p.is_string()) {
      c.problem.name = p.get<std::string>();
    } else {
      require_object(p, "/problem");
      c.problem.name = field<std::string>(p, "name", "/problem", c.problem.name);
      c.problem.n_states = field<std::size_t>(p, "n_states", "/problem", c.problem.n_states);
      c.problem.well_depth = field<double>(p, "well_depth", "/problem", c.problem.well_depth);
      c.problem.grid_points = field<std::size_t>(p, "grid_points", "/problem", c.problem.grid_points);
      auto& a = c.problem.aircraft;
      a.n_steps = field<std::size_t>(p, "n_steps", "/problem", a.n_steps);
      a.positions = field<std::size_t>(p, "positions", "/problem", a.positions);
      a.levels = field<std::size_t>(p, "levels", "/problem", a.levels);
      a.wind_seed = field<std::uint64_t>(p, "wind_seed", "/problem", a.wind_seed);
      a.wind_noise = field<double>(p, "wind_noise", "/problem", a.wind_noise);
      a.time_weight = field<double>(p, "time_weight", "/problem", a.time_weight);
      if (p.contains("space")) c.problem.space = p.at("space");
      if (p.contains("cost")) c.problem.cost = p.at("cost");
    }
    const auto& n = c.problem.name;
    if (n != "hajek" && n != "ackley1d" && n != "aircraft" && n != "table")
      throw ConfigError("/problem/name", "expected hajek|ackley1d|aircraft|table, got '" + n + "'");
    if (n == "table" && (c.problem.space.is_null() || c.problem.cost.is_null()))
      throw ConfigError("/problem", "table problems need 'space' and 'cost'");
  }

  if (doc.contains("noise")) {
    require_object(doc.at("noise"), "/noise");
    try {
      c.noise = noise_spec_from_json(doc.at("noise"));
    } catch (const std::exception& e) {
      throw ConfigError("/noise", e.what());
    }
    if (c.noise.kind == NoiseKind::custom) throw ConfigError("/noise/kind", "custom noise is not configurable");
  }

  if (doc.contains("schedule")) {
    const json& s = doc.at("schedule");
    if (s.is_string()) {
      apply_sampling_preset(c.schedule, s.get<std::string>());
    } else {
      require_object(s, "/schedule");
      c.schedule = s;
      if (s.contains("preset")) apply_sampling_preset(c.schedule, s.at("preset").get<std::string>());
    }
  }

  if (doc.contains("engine")) {
    const json& e = doc.at("engine");
    try {
      if (e.is_string()) {
        c.engine.kind = engine_kind_from_string(e.get<std::string>());
      } else {
        require_object(e, "/engine");
        c.engine.kind = engine_kind_from_string(field<std::string>(e, "kind", "/engine", "nsa"));
        c.engine.n_fixed = field<std::uint64_t>(e, "n_fixed", "/engine", 1);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ConfigError("/engine", ex.what());
    }
    if (c.engine.n_fixed < 1) throw ConfigError("/engine/n_fixed", "must be >= 1");
  }

  c.replicates = field<std::size_t>(doc, "replicates", "", c.replicates);
  if (c.replicates < 1) throw ConfigError("/replicates", "must be >= 1");
  if (doc.contains("stop")) c.stop = stop_from_json(doc.at("stop"));
  if (doc.contains("checkpoints")) {
    const json& cp = doc.at("checkpoints");
    if (!cp.is_array()) throw ConfigError("/checkpoints", "expected an array of times");
    std::vector<double> times;
    for (std::size_t i = 0; i < cp.size(); ++i) {
      if (!cp[i].is_number() || cp[i].get<double>() < 0.0)
        throw ConfigError("/checkpoints/" + std::to_string(i), "expected a non-negative time");
      times.push_back(cp[i].get<double>());
    }
    c.checkpoints = std::move(times);
  }
  c.epsilon = field<double>(doc, "epsilon", "", c.epsilon);
  if (!(c.epsilon >= 0.0)) throw ConfigError("/epsilon", "must be >= 0");
  c.seed = field<std::uint64_t>(doc, "seed", "", c.seed);
  c.workers = field<unsigned>(doc, "workers", "", c.workers);
  c.record_traces = field<bool>(doc, "record_traces", "", c.record_traces);
  if (doc.contains("selection_batch") && !doc.at("selection_batch").is_null())
    c.selection_batch = field<std::uint64_t>(doc, "selection_batch", "", 1);
  if (doc.contains("initial_state") && !doc.at("initial_state").is_null())
    c.initial_state = field<StateIndex>(doc, "initial_state", "", 0);
  const auto clock = field<std::string>(doc, "clock", "", "pre_jump");
  if (clock == "pre_jump") c.clock = AcceptanceClock::pre_jump;
  else if (clock == "post_jump") c.clock = AcceptanceClock::post_jump;
  else throw ConfigError("/clock", "expected pre_jump|post_jump");

  if (c.engine.kind == EngineKind::classical && c.problem.name == "table" && c.problem.cost.is_null())
    throw ConfigError("/engine", "classical engine needs exact costs");
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json problem = {{"name", c.problem.name}};
  if (c.problem.name == "hajek") {
    problem["n_states"] = c.problem.n_states;
    problem["well_depth"] = c.problem.well_depth;
  } else if (c.problem.name == "ackley1d") {
    problem["grid_points"] = c.problem.grid_points;
  } else if (c.problem.name == "aircraft") {
    const auto& a = c.problem.aircraft;
    problem["n_steps"] = a.n_steps;
    problem["positions"] = a.positions;
    problem["levels"] = a.levels;
    problem["wind_seed"] = a.wind_seed;
    problem["wind_noise"] = a.wind_noise;
    problem["time_weight"] = a.time_weight;
  } else {
    problem["space"] = c.problem.space;
    problem["cost"] = c.problem.cost;
  }
  json doc = {{"problem", problem},
              {"noise", noise_spec_to_json(c.noise)},
              {"schedule", c.schedule},
              {"engine", {{"kind", to_string(c.engine.kind)}, {"n_fixed", c.engine.n_fixed}}},
              {"replicates", c.replicates},
              {"stop", stop_to_json(c.stop)},
              {"epsilon", c.epsilon},
              {"seed", c.seed},
              {"workers", c.workers},
              {"record_traces", c.record_traces},
              {"clock", c.clock == AcceptanceClock::pre_jump ? "pre_jump" : "post_jump"}};
  if (c.checkpoints) doc["checkpoints"] = *c.checkpoints;
  doc["selection_batch"] = c.selection_batch ? json(*c.selection_batch) : json(nullptr);
  doc["initial_state"] = c.initial_state ? json(*c.initial_state) : json(nullptr);
  return doc;
}

json load_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(col),
                      "JSON syntax error");
  }
}

std::vector<MatrixCell> expand_matrix(const json& doc) {
  if (!doc.contains("matrix")) return {{"", config_from_json(doc)}};
  const json base = doc.value("base", json::object());
  const json& m = doc.at("matrix");
  require_object(m, "/matrix");
  for (const auto& [key, _] : m.items())
    if (key != "noise_sd" && key != "schedule" && key != "engine")
      throw ConfigError("/matrix/" + key, "unknown matrix axis (expected noise_sd|schedule|engine)");
  auto axis = [&](const char* key) {
    if (!m.contains(key)) return std::vector<json>{json()};
    if (!m.at(key).is_array() || m.at(key).empty())
      throw ConfigError(std::string("/matrix/") + key, "expected a non-empty array");
    return m.at(key).get<std::vector<json>>();
  };

  std::vector<MatrixCell> cells;
  for (const json& sd : axis("noise_sd")) {
    for (const json& sched : axis("schedule")) {
      for (const json& eng : axis("engine")) {
        json cell = base;
        std::string name;
        auto append = [&](const std::string& part) { name += (name.empty() ? "" : "__") + part; };
        if (!sd.is_null()) {
          const std::string kind = base.contains("noise") ? base["noise"].value("kind", "gaussian") : "gaussian";
          cell["noise"] = {{"kind", kind == "none" ? "gaussian" : kind}, {"param", sd}};
          append("noise_sd=" + format_number(sd.get<double>()));
        }
        if (!sched.is_null()) {
          json s = base.value("schedule", json::object());
          if (s.is_string()) {
            json tmp = json::object();
            apply_sampling_preset(tmp, s.get<std::string>());
            s = tmp;
          }
          apply_sampling_preset(s, sched.get<std::string>());
          cell["schedule"] = s;
          append("schedule=" + sched.get<std::string>());
        }
        if (!eng.is_null()) {
          cell["engine"] = eng;
          append("engine=" + (eng.is_string() ? eng.get<std::string>() : eng.value("kind", "nsa")));
        }
        cells.push_back({name, config_from_json(cell)});
      }
    }
  }
  return cells;
}

BenchmarkProblem build_problem(const ProblemSpec& spec, const NoiseSpec& noise) {
  if (spec.name == "hajek") return hajek_problem(spec.n_states, spec.well_depth, noise);
  if (spec.name == "ackley1d") return ackley_1d(noise, spec.grid_points);
  if (spec.name == "aircraft") {
    // Additive noise specs do not apply; the surrogate carries its own wind noise.
    return aircraft_surrogate(spec.aircraft);
  }
  BenchmarkProblem p;
  p.space = space_from_json(spec.space);
  p.exact_J = cost_table_from_json(spec.cost);
  if (p.exact_J.size() != p.space.size())
    throw ConfigError("/problem/cost", "cost table size does not match the space");
  p.space.restrict_feasible(p.exact_J);
  p.oracle = make_oracle(p.exact_J, noise);
  p.meta = {"table", "user-table", m_star(p.space, p.exact_J)};
  return p;
}

ScheduleParams resolve_schedule(const ExperimentConfig& config, const BenchmarkProblem& problem) {
  const json& doc = config.schedule;
  try {
    ScheduleParams p = schedule_from_json(doc, problem.meta.m_star);
    // An explicit alpha (e.g. from a sampling preset) wins over the auto value.
    if (doc.contains("auto") && doc.contains("alpha")) p.alpha = doc.at("alpha").get<double>();
    p.validate();
    return p;
  } catch (const std::exception& e) {
    throw ConfigError("/schedule", e.what());
  }
}

std::vector<double> default_checkpoints(double horizon, std::size_t count) {
  std::vector<double> out;
  if (!(horizon > 0.0) || count == 0) return out;
  const double lo = std::max(horizon * 1e-3, 1e-3);
  if (count == 1) return {horizon};
  const double r = std::pow(horizon / lo, 1.0 / static_cast<double>(count - 1));
  double t = lo;
  for (std::size_t i = 0; i < count; ++i, t *= r) out.push_back(i + 1 == count ? horizon : t);
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult res;
  res.config = config;
  const BenchmarkProblem problem = build_problem(config.problem, config.noise);
  res.schedule = resolve_schedule(config, problem);
  res.chi = chi_epsilon(problem.exact_J, config.epsilon);

  std::vector<double> checkpoints;
  if (config.checkpoints) checkpoints = *config.checkpoints;
  else if (config.stop.kind == StopRule::Kind::horizon) checkpoints = default_checkpoints(config.stop.budget);
  std::sort(checkpoints.begin(), checkpoints.end());

  EnsembleOptions opts;
  opts.replicates = config.replicates;
  opts.seed = config.seed;
  opts.workers = config.workers;
  opts.selection_batch = config.selection_batch;
  opts.run.clock = config.clock;
  opts.run.record_jumps = config.record_traces;
  opts.run.checkpoints = checkpoints;
  if (config.initial_state) {
    if (*config.initial_state >= problem.space.size() || !problem.space.feasible(*config.initial_state))
      throw ConfigError("/initial_state", "not a feasible state of the problem");
    opts.run.initial_state = config.initial_state;
  }

  res.ensemble = run_replicates(problem.space, problem.oracle, Cooling::from(res.schedule), config.engine,
                                config.stop, opts);

  if (!checkpoints.empty()) res.curve = success_from_checkpoints(res.ensemble.traces, res.chi, checkpoints);

  std::vector<bool> in(problem.space.size(), false);
  for (StateIndex x : res.chi) in[x] = true;
  double evals = 0.0;
  for (const auto& tr : res.ensemble.traces) {
    if (in[tr.final_state]) ++res.final_hits;
    evals += static_cast<double>(tr.oracle_evals);
  }
  const auto K = res.ensemble.traces.size();
  res.final_interval = wilson_interval(res.final_hits, K);
  res.mean_evals = evals / static_cast<double>(K);

  if (config.stop.kind == StopRule::Kind::horizon && config.engine.kind == EngineKind::nsa) {
    // Each iteration evaluates the current and the candidate state N_k times.
    BudgetReport b;
    b.horizon = config.stop.budget;
    const CallBound bound = expected_call_bound(b.horizon, res.schedule);
    b.bound = bound.tight;
    b.loose_bound = bound.loose;
    b.mean_batch_sum = res.mean_evals / 2.0;
    b.margin = b.bound - b.mean_batch_sum;
    b.pass = b.mean_batch_sum <= b.bound;
    if (res.schedule.sampling == SamplingVariant::power) res.budget = b;
  }
  return res;
}

void write_bundle(const ExperimentResult& res, const fs::path& dir) {
  fs::create_directories(dir);
  const auto& c = res.config;
  const std::size_t K = res.ensemble.traces.size();

  json manifest = {{"version", library_version()},
                   {"seed", c.seed},
                   {"config", config_to_json(c)},
                   {"resolved_schedule", schedule_to_json(res.schedule)},
                   {"schedule_label", schedule_label(res.schedule)}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  json summary = {{"problem", c.problem.name},
                  {"engine", to_string(c.engine.kind)},
                  {"noise", noise_spec_to_json(c.noise)},
                  {"schedule", schedule_label(res.schedule)},
                  {"alpha", res.schedule.alpha},
                  {"replicates", K},
                  {"epsilon", c.epsilon},
                  {"chi_size", res.chi.size()},
                  {"final_hits", res.final_hits},
                  {"final_success", static_cast<double>(res.final_hits) / static_cast<double>(K)},
                  {"final_ci", {res.final_interval.lo, res.final_interval.hi}},
                  {"mean_evals", res.mean_evals},
                  {"selection_batch", res.ensemble.selection_batch},
                  {"selection_evals", res.ensemble.selection_evals},
                  {"winner", res.ensemble.winner},
                  {"winner_replicate", res.ensemble.winner_replicate}};
  if (res.budget) summary["budget"] = budget_to_json(*res.budget);
  write_text(dir / "summary.json", summary.dump(2) + "\n");

  {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "replicate,final_state,final_t,iterations,oracle_evals,selection_estimate\n";
    for (std::size_t i = 0; i < K; ++i) {
      const auto& tr = res.ensemble.traces[i];
      os << i << ',' << tr.final_state << ',' << tr.final.t << ',' << tr.final.k << ',' << tr.oracle_evals
         << ',' << res.ensemble.selection_estimates[i] << '\n';
    }
    write_text(dir / "final.csv", os.str());
  }
  if (res.curve) {
    std::ostringstream os;
    write_success_csv(os, *res.curve);
    write_text(dir / "success.csv", os.str());
  }
  if (res.budget) write_text(dir / "budget.json", budget_to_json(*res.budget).dump(2) + "\n");
  if (c.record_traces) {
    fs::create_directories(dir / "traces");
    for (std::size_t i = 0; i < K; ++i) {
      char name[48];
      std::snprintf(name, sizeof name, "replicate_%04zu.csv", i);
      std::ostringstream os;
      write_trace_csv(os, res.ensemble.traces[i]);
      write_text(dir / "traces" / name, os.str());
    }
  }
}

namespace {

SummaryRow read_bundle(const fs::path& dir) {
  json summary, manifest;
  try {
    summary = load_json_file(dir / "summary.json");
    manifest = load_json_file(dir / "manifest.json");
  } catch (const std::exception& e) {
    throw std::runtime_error("corrupt bundle " + dir.string() + ": " + e.what());
  }
  SummaryRow row;
  try {
    row.bundle = dir.filename().string();
    row.problem = summary.at("problem").get<std::string>();
    row.engine = summary.at("engine").get<std::string>();
    row.noise = summary.at("noise").at("param").get<double>();
    row.schedule = summary.at("schedule").get<std::string>();
    row.alpha = summary.at("alpha").get<double>();
    row.replicates = summary.at("replicates").get<std::size_t>();
    row.hits = summary.at("final_hits").get<std::size_t>();
    row.success = summary.at("final_success").get<double>();
    row.interval = {summary.at("final_ci")[0].get<double>(), summary.at("final_ci")[1].get<double>()};
    row.mean_evals = summary.at("mean_evals").get<double>();
    if (summary.contains("budget")) row.budget_margin = summary.at("budget").at("margin").get<double>();
  } catch (const json::exception& e) {
    throw std::runtime_error("corrupt bundle " + dir.string() + ": " + e.what());
  }
  return row;
}

}  // namespace

std::vector<SummaryRow> analyze(const fs::path& root, double level) {
  if (!fs::exists(root)) throw std::runtime_error("missing bundle directory " + root.string());
  std::vector<fs::path> bundles;
  if (fs::exists(root / "manifest.json")) {
    bundles.push_back(root);
  } else {
    for (const auto& entry : fs::directory_iterator(root))
      if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) bundles.push_back(entry.path());
  }
  if (bundles.empty()) throw std::runtime_error("no result bundle under " + root.string());
  std::sort(bundles.begin(), bundles.end());

  std::vector<SummaryRow> rows;
  for (const auto& b : bundles) rows.push_back(read_bundle(b));
  std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
    if (a.noise != b.noise) return a.noise < b.noise;
    const int ra = schedule_rank(a.schedule), rb = schedule_rank(b.schedule);
    if (ra != rb) return ra < rb;
    if (a.schedule != b.schedule) return a.schedule < b.schedule;
    return a.bundle < b.bundle;
  });

  const double zcrit = normal_quantile_two_sided(level);
  for (auto& row : rows) {
    const auto ref = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& r) {
      return r.schedule == "quadratic" && r.problem == row.problem && r.engine == row.engine &&
             r.noise == row.noise;
    });
    if (ref == rows.end() || &*ref == &row) continue;
    row.z = two_proportion_z(row.hits, row.replicates, ref->hits, ref->replicates);
    row.flagged = std::abs(row.z) > zcrit;
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "bundle,problem,engine,noise,schedule,alpha,replicates,success,ci_lo,ci_hi,mean_evals,budget_margin,z_vs_quadratic,flagged\n";
  out << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.bundle << ',' << r.problem << ',' << r.engine << ',' << r.noise << ',' << r.schedule << ','
        << r.alpha << ',' << r.replicates << ',' << r.success << ',' << r.interval.lo << ',' << r.interval.hi
        << ',' << r.mean_evals << ',';
    if (r.budget_margin) out << *r.budget_margin;
    out << ',' << r.z << ',' << (r.flagged ? 1 : 0) << '\n';
  }
}

void write_summary_table(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << std::left << std::setw(10) << "problem" << std::setw(10) << "engine" << std::setw(8) << "noise"
      << std::setw(11) << "schedule" << std::setw(6) << "K" << std::setw(22) << "success [95% CI]"
      << std::setw(14) << "mean evals" << "flag\n";
  for (const auto& r : rows) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << r.success << " [" << r.interval.lo << ", " << r.interval.hi << "]";
    std::ostringstream e;
    e << std::setprecision(4) << r.mean_evals;
    out << std::left << std::setw(10) << r.problem << std::setw(10) << r.engine << std::setw(8) << r.noise
        << std::setw(11) << r.schedule << std::setw(6) << r.replicates << std::setw(22) << s.str()
        << std::setw(14) << e.str() << (r.flagged ? "*" : "") << '\n';
  }
}

}  // namespace nsa
