#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "nsa/cost_model.hpp"
#include "nsa/rng.hpp"
#include "nsa/schedule.hpp"
#include "nsa/state_space.hpp"

namespace nsa {

// Inverse temperature and sampling intensity as functions of process time.
struct Cooling {
  std::function<double(double)> beta;
  std::function<double(double)> intensity;

  static Cooling from(const ScheduleParams& params);
  // Frozen temperature, used for stationarity checks.
  static Cooling frozen(double beta, double intensity = 0.0);
};

// Which inverse temperature the acceptance test uses within one iteration:
// beta(t_k) before the clock advances, or beta(t_{k+1}) after it.
enum class AcceptanceClock { pre_jump, post_jump };

struct ChainState {
  StateIndex x = 0;
  double t = 0.0;
  std::uint64_t k = 0;
  double beta = 0.0;
  std::uint64_t evals = 0;
};

// One completed iteration.
struct JumpRecord {
  std::uint64_t k = 0;
  double t = 0.0;  // jump time t_{k+1}
  StateIndex state = 0;
  StateIndex candidate = 0;
  bool accepted = false;
  std::uint64_t batch = 0;
  double j_hat_current = 0.0;
  double j_hat_candidate = 0.0;
  double beta = 0.0;  // inverse temperature used for the acceptance test
  std::uint64_t cum_evals = 0;
};

struct StopRule {
  enum class Kind { max_iterations, max_evals, horizon };
  Kind kind = Kind::max_iterations;
  double budget = 1000.0;

  static StopRule iterations(std::uint64_t n) { return {Kind::max_iterations, static_cast<double>(n)}; }
  static StopRule evals(std::uint64_t n) { return {Kind::max_evals, static_cast<double>(n)}; }
  static StopRule horizon(double T) { return {Kind::horizon, T}; }
  void validate() const;
};

struct RunOptions {
  AcceptanceClock clock = AcceptanceClock::pre_jump;
  // Keep every JumpRecord. Long ensemble runs turn this off and rely on
  // checkpoint samples instead.
  bool record_jumps = true;
  // Times at which the piecewise-constant state and cumulative evals are sampled.
  std::vector<double> checkpoints;
  std::optional<StateIndex> initial_state;
};

struct Trace {
  StateIndex initial_state = 0;
  std::vector<JumpRecord> jumps;
  std::vector<StateIndex> checkpoint_states;
  std::vector<std::uint64_t> checkpoint_evals;
  ChainState final;
  // State occupied at the horizon (horizon rule) or after the last iteration.
  StateIndex final_state = 0;
  std::uint64_t oracle_evals = 0;

  // Piecewise-constant interpolation X_t = state of the last jump with t_k <= t.
  StateIndex state_at(double t) const;
  std::uint64_t evals_at(double t) const;
  double horizon() const { return jumps.empty() ? 0.0 : jumps.back().t; }
};

// exp(-beta * max(delta, 0)); zero for an infinite delta at any beta.
double acceptance_probability(double delta, double beta);

// Exact Metropolis acceptance for y proposed from x.
double classical_acceptance(std::span<const double> cost, StateIndex x, StateIndex y, double beta);

struct StepOutcome {
  ChainState state;
  JumpRecord record;
};

// One iteration of the noisy annealing chain. Draw order: candidate, batch
// size, current-state batch, candidate batch, exponential clock, acceptance
// uniform. `fixed_batch` replaces the Poisson batch size when set.
StepOutcome nsa_step(const ChainState& state, const FiniteSpace& space, const CostOracle& oracle,
                     const Cooling& cooling, Rng& rng,
                     AcceptanceClock clock = AcceptanceClock::pre_jump,
                     std::optional<std::uint64_t> fixed_batch = std::nullopt);

Trace run_nsa(const FiniteSpace& space, const CostOracle& oracle, const Cooling& cooling,
              const StopRule& stop, Rng& rng, const RunOptions& options = {});

// Metropolis with exact costs and the same exponential jump clock.
Trace run_classical_sa(const FiniteSpace& space, std::span<const double> exact_J,
                       const Cooling& cooling, const StopRule& stop, Rng& rng,
                       const RunOptions& options = {});

// Noisy chain with a constant batch size; n_fixed = 1 is naive noisy annealing.
Trace run_fixed_sample_sa(const FiniteSpace& space, const CostOracle& oracle,
                          const Cooling& cooling, std::uint64_t n_fixed, const StopRule& stop,
                          Rng& rng, const RunOptions& options = {});

enum class EngineKind { nsa, classical, fixed_n };

const char* to_string(EngineKind kind);
EngineKind engine_kind_from_string(const std::string& name);

struct EngineSpec {
  EngineKind kind = EngineKind::nsa;
  std::uint64_t n_fixed = 1;
};

struct EnsembleOptions {
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  // Selection batch size; defaults to ceil(n(T_final)) of the cooling.
  std::optional<std::uint64_t> selection_batch;
  RunOptions run;
};

struct EnsembleResult {
  std::vector<Trace> traces;
  std::vector<StateIndex> final_states;
  StateIndex winner = 0;
  std::size_t winner_replicate = 0;
  std::vector<double> selection_estimates;
  std::uint64_t selection_batch = 0;
  std::uint64_t selection_evals = 0;
  std::uint64_t run_evals = 0;
};

// K independent chains on streams Rng::stream(seed, i), followed by a fresh
// re-estimation of each final state with the selection batch and argmin.
EnsembleResult run_replicates(const FiniteSpace& space, const CostOracle& oracle,
                              const Cooling& cooling, const EngineSpec& engine,
                              const StopRule& stop, const EnsembleOptions& options);

// Columns: k,t_k,state,accepted,N_k,J_hat_current,J_hat_candidate,beta,cum_evals
void write_trace_csv(std::ostream& out, const Trace& trace);

}  // namespace nsa
