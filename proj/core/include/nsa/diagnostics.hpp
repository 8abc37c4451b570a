#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsa/cost_model.hpp"
#include "nsa/engine.hpp"
#include "nsa/schedule.hpp"
#include "nsa/state_space.hpp"

namespace nsa {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Wilson score interval for `successes` out of `trials` at normal quantile z.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

struct SuccessCurve {
  std::vector<double> checkpoints;
  std::vector<double> success;
  std::vector<Interval> interval;
  std::vector<double> evals;
  std::size_t replicates = 0;
};

// Fraction of traces whose piecewise-constant state at each time lies in
// `chi`. Throws if a trace does not reach max(times).
SuccessCurve empirical_success(std::span<const Trace> traces, std::span<const StateIndex> chi,
                               std::span<const double> times);

// Same from checkpoint samples recorded during the runs (RunOptions::checkpoints).
SuccessCurve success_from_checkpoints(std::span<const Trace> traces,
                                      std::span<const StateIndex> chi,
                                      std::span<const double> times);

void write_success_csv(std::ostream& out, const SuccessCurve& curve);
nlohmann::json success_to_json(const SuccessCurve& curve);

struct SandwichReport {
  double estimate = 0.0;       // Monte-Carlo mean of exp(-beta (J_hat(y) - J_hat(x))_+)
  double standard_error = 0.0;
  double exact = 0.0;          // exp(-beta (J(y) - J(x))_+)
  double ratio = 0.0;
  double ratio_se = 0.0;
  EpsilonBounds bounds;
  double lower = 0.0;          // 1 + eps- - 3 se
  double upper = 0.0;          // 1 + eps+ + 3 se
  bool pass = false;
};

// Noisy-kernel ratio check against [1 + eps-, 1 + eps+] with N ~ Poisson(n) + 1.
SandwichReport acceptance_sandwich(const CostOracle& oracle, StateIndex x, StateIndex y, double beta,
                                   double n, double delta, std::size_t repeats, Rng& rng);

// Total-variation distance between post-burn-in occupation frequencies of the
// embedded chain and the stationary law at `beta` (mu0 e^{-beta J}).
double stationarity_distance(std::span<const Trace> traces, const FiniteSpace& space,
                             std::span<const double> cost, double beta, double burn_in = 0.2);

double total_variation(std::span<const double> p, std::span<const double> q);

struct BudgetReport {
  double horizon = 0.0;
  double mean_batch_sum = 0.0;  // mean over runs of sum of N_k over iterations started before T
  double bound = 0.0;           // T (1 + d T)^alpha
  double loose_bound = 0.0;
  double margin = 0.0;          // bound - mean_batch_sum
  bool pass = false;
};

BudgetReport budget_check(std::span<const Trace> traces, const ScheduleParams& params, double T);

nlohmann::json budget_to_json(const BudgetReport& report);

// Two-sided two-proportion z statistic (pooled).
double two_proportion_z(std::size_t s1, std::size_t n1, std::size_t s2, std::size_t n2);

// Standard normal quantile for two-sided level (e.g. 0.01 -> 2.5758).
double normal_quantile_two_sided(double level);

}  // namespace nsa
