#include "nsa/engine.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>
#include <thread>
#include <type_traits>

namespace nsa {

Cooling Cooling::from(const ScheduleParams& params) {
  params.validate();
  return {[params](double t) { return beta_at(params, t); },
          [params](double t) { return n_at(params, t); }};
}

Cooling Cooling::frozen(double beta, double intensity) {
  if (!(beta >= 0.0) || !(intensity >= 0.0))
    throw std::invalid_argument("Cooling::frozen: beta and intensity must be >= 0");
  return {[beta](double) { return beta; }, [intensity](double) { return intensity; }};
}

void StopRule::validate() const {
  if (!(budget > 0.0)) throw std::invalid_argument("stop rule budget must be > 0");
}

StateIndex Trace::state_at(double t) const {
  auto it = std::upper_bound(jumps.begin(), jumps.end(), t,
                             [](double v, const JumpRecord& r) { return v < r.t; });
  if (it == jumps.begin()) return initial_state;
  return std::prev(it)->state;
}

std::uint64_t Trace::evals_at(double t) const {
  // Batch k is drawn at the start time of iteration k, the previous jump time.
  auto it = std::upper_bound(jumps.begin(), jumps.end(), t,
                             [](double v, const JumpRecord& r) { return v < r.t; });
  const auto started = static_cast<std::size_t>(it - jumps.begin());
  if (jumps.empty() || t < 0.0) return 0;
  if (started < jumps.size()) return jumps[started].cum_evals;
  return jumps.back().cum_evals;
}

double acceptance_probability(double delta, double beta) {
  if (is_infeasible(delta)) return 0.0;
  if (!(delta > 0.0)) return 1.0;
  return std::exp(-beta * delta);
}

double classical_acceptance(std::span<const double> cost, StateIndex x, StateIndex y, double beta) {
  if (is_infeasible(cost[y])) return 0.0;
  return acceptance_probability(cost[y] - cost[x], beta);
}

namespace {

// Exact-cost comparison for classical annealing; no oracle draws.
struct ExactCosts {
  std::span<const double> cost;
};

struct NoisyCosts {
  const CostOracle* oracle;
  std::optional<std::uint64_t> fixed_batch;
};

template <typename Costs>
StepOutcome step_impl(const ChainState& state, const FiniteSpace& space, const Costs& costs,
                      const Cooling& cooling, Rng& rng, AcceptanceClock clock) {
  StepOutcome out;
  JumpRecord& rec = out.record;
  rec.k = state.k;
  const StateIndex candidate = space.propose(state.x, rng);
  rec.candidate = candidate;

  if constexpr (std::is_same_v<Costs, ExactCosts>) {
    rec.batch = 0;
    rec.j_hat_current = costs.cost[state.x];
    rec.j_hat_candidate = costs.cost[candidate];
  } else {
    const std::uint64_t n = costs.fixed_batch ? *costs.fixed_batch
                                              : draw_batch_size(cooling.intensity(state.t), rng);
    rec.batch = n;
    const BatchEstimate current = estimate_cost(*costs.oracle, state.x, n, rng);
    const BatchEstimate proposed = estimate_cost(*costs.oracle, candidate, n, rng);
    rec.j_hat_current = current.mean;
    rec.j_hat_candidate = proposed.mean;
    out.state.evals = state.evals + current.draws_consumed + proposed.draws_consumed;
  }
  if constexpr (std::is_same_v<Costs, ExactCosts>) out.state.evals = state.evals;

  const double t_next = state.t + rng.exponential();
  const double beta_next = cooling.beta(t_next);
  const double beta_accept = clock == AcceptanceClock::pre_jump ? state.beta : beta_next;
  const double p = is_infeasible(rec.j_hat_candidate)
                       ? 0.0
                       : acceptance_probability(rec.j_hat_candidate - rec.j_hat_current, beta_accept);
  const double u = rng.uniform();
  rec.accepted = u < p;

  out.state.x = rec.accepted ? candidate : state.x;
  out.state.t = t_next;
  out.state.k = state.k + 1;
  out.state.beta = beta_next;
  rec.t = t_next;
  rec.state = out.state.x;
  rec.beta = beta_accept;
  rec.cum_evals = out.state.evals;
  return out;
}

template <typename Costs>
Trace run_impl(const FiniteSpace& space, const Costs& costs, const Cooling& cooling,
               const StopRule& stop, Rng& rng, const RunOptions& options) {
  stop.validate();
  Trace trace;
  StateIndex x0;
  if (options.initial_state) {
    x0 = *options.initial_state;
    if (x0 >= space.size() || !space.feasible(x0))
      throw std::invalid_argument("initial state is infeasible");
  } else {
    x0 = space.draw_initial(rng);
  }
  if constexpr (std::is_same_v<Costs, ExactCosts>) {
    if (is_infeasible(costs.cost[x0])) throw std::invalid_argument("initial state has infinite cost");
  }
  trace.initial_state = x0;

  std::vector<double> checkpoints = options.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  std::size_t next_cp = 0;
  trace.checkpoint_states.reserve(checkpoints.size());
  trace.checkpoint_evals.reserve(checkpoints.size());

  ChainState state;
  state.x = x0;
  state.t = 0.0;
  state.beta = cooling.beta(0.0);
  StateIndex final_state = x0;
  bool horizon_hit = false;

  auto keep_going = [&]() {
    switch (stop.kind) {
      case StopRule::Kind::max_iterations: return static_cast<double>(state.k) < stop.budget;
      case StopRule::Kind::max_evals: return static_cast<double>(state.evals) < stop.budget;
      case StopRule::Kind::horizon: return state.t < stop.budget;
    }
    return false;
  };

  while (keep_going()) {
    const StepOutcome out = step_impl(state, space, costs, cooling, rng, options.clock);
    while (next_cp < checkpoints.size() && checkpoints[next_cp] < out.state.t) {
      trace.checkpoint_states.push_back(state.x);
      trace.checkpoint_evals.push_back(out.state.evals);
      ++next_cp;
    }
    if (stop.kind == StopRule::Kind::horizon && out.state.t > stop.budget && !horizon_hit) {
      final_state = state.x;
      horizon_hit = true;
    }
    if (options.record_jumps) trace.jumps.push_back(out.record);
    state = out.state;
  }
  while (next_cp < checkpoints.size()) {
    trace.checkpoint_states.push_back(state.x);
    trace.checkpoint_evals.push_back(state.evals);
    ++next_cp;
  }
  trace.final = state;
  trace.final_state = horizon_hit ? final_state : state.x;
  trace.oracle_evals = state.evals;
  return trace;
}

}  // namespace

StepOutcome nsa_step(const ChainState& state, const FiniteSpace& space, const CostOracle& oracle,
                     const Cooling& cooling, Rng& rng, AcceptanceClock clock,
                     std::optional<std::uint64_t> fixed_batch) {
  if (!space.feasible(state.x)) throw std::invalid_argument("nsa_step: current state is infeasible");
  return step_impl(state, space, NoisyCosts{&oracle, fixed_batch}, cooling, rng, clock);
}

Trace run_nsa(const FiniteSpace& space, const CostOracle& oracle, const Cooling& cooling,
              const StopRule& stop, Rng& rng, const RunOptions& options) {
  return run_impl(space, NoisyCosts{&oracle, std::nullopt}, cooling, stop, rng, options);
}

Trace run_classical_sa(const FiniteSpace& space, std::span<const double> exact_J,
                       const Cooling& cooling, const StopRule& stop, Rng& rng,
                       const RunOptions& options) {
  if (exact_J.size() != space.size())
    throw std::invalid_argument("run_classical_sa: cost table size mismatch");
  return run_impl(space, ExactCosts{exact_J}, cooling, stop, rng, options);
}

Trace run_fixed_sample_sa(const FiniteSpace& space, const CostOracle& oracle,
                          const Cooling& cooling, std::uint64_t n_fixed, const StopRule& stop,
                          Rng& rng, const RunOptions& options) {
  if (n_fixed < 1) throw std::invalid_argument("run_fixed_sample_sa: N_fixed must be >= 1");
  return run_impl(space, NoisyCosts{&oracle, n_fixed}, cooling, stop, rng, options);
}

const char* to_string(EngineKind kind) {
  switch (kind) {
    case EngineKind::nsa: return "nsa";
    case EngineKind::classical: return "classical";
    case EngineKind::fixed_n: return "fixed_n";
  }
  return "nsa";
}

EngineKind engine_kind_from_string(const std::string& name) {
  if (name == "nsa") return EngineKind::nsa;
  if (name == "classical") return EngineKind::classical;
  if (name == "fixed_n" || name == "fixed_N") return EngineKind::fixed_n;
  throw std::invalid_argument("unknown engine '" + name + "' (expected nsa|classical|fixed_n)");
}

EnsembleResult run_replicates(const FiniteSpace& space, const CostOracle& oracle,
                              const Cooling& cooling, const EngineSpec& engine,
                              const StopRule& stop, const EnsembleOptions& options) {
  if (options.replicates < 1) throw std::invalid_argument("run_replicates: K must be >= 1");
  if (engine.kind == EngineKind::classical && !oracle.exact_J)
    throw std::invalid_argument("run_replicates: classical engine needs exact costs");

  const std::size_t K = options.replicates;
  EnsembleResult result;
  result.traces.resize(K);

  auto run_one = [&](std::size_t i) {
    Rng rng = Rng::stream(options.seed, i);
    switch (engine.kind) {
      case EngineKind::nsa:
        result.traces[i] = run_nsa(space, oracle, cooling, stop, rng, options.run);
        break;
      case EngineKind::classical:
        result.traces[i] = run_classical_sa(space, *oracle.exact_J, cooling, stop, rng, options.run);
        break;
      case EngineKind::fixed_n:
        result.traces[i] = run_fixed_sample_sa(space, oracle, cooling, engine.n_fixed, stop, rng,
                                               options.run);
        break;
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(K)));
  if (workers == 1) {
    for (std::size_t i = 0; i < K; ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (std::size_t i = w; i < K; i += workers) run_one(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  double t_final = 0.0;
  for (const auto& tr : result.traces) {
    result.final_states.push_back(tr.final_state);
    result.run_evals += tr.oracle_evals;
    t_final = std::max(t_final, tr.final.t);
  }

  if (engine.kind == EngineKind::classical) {
    result.selection_batch = 0;
    for (StateIndex x : result.final_states) result.selection_estimates.push_back((*oracle.exact_J)[x]);
  } else {
    result.selection_batch =
        options.selection_batch.value_or(static_cast<std::uint64_t>(
            std::max(1.0, std::ceil(cooling.intensity(t_final)))));
    for (std::size_t i = 0; i < K; ++i) {
      Rng rng = Rng::stream(~options.seed, i);
      const BatchEstimate est = estimate_cost(oracle, result.final_states[i], result.selection_batch, rng);
      result.selection_estimates.push_back(est.mean);
      result.selection_evals += est.draws_consumed;
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < K; ++i)
    if (result.selection_estimates[i] < result.selection_estimates[best]) best = i;
  result.winner_replicate = best;
  result.winner = result.final_states[best];
  return result;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "k,t_k,state,accepted,N_k,J_hat_current,J_hat_candidate,beta,cum_evals\n";
  out << std::setprecision(17);
  for (const auto& r : trace.jumps) {
    out << r.k << ',' << r.t << ',' << r.state << ',' << (r.accepted ? 1 : 0) << ',' << r.batch
        << ',' << r.j_hat_current << ',' << r.j_hat_candidate << ',' << r.beta << ','
        << r.cum_evals << '\n';
  }
}

}  // namespace nsa
