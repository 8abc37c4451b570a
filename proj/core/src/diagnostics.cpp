#include "nsa/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>

namespace nsa {

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

namespace {

std::vector<bool> membership(std::span<const StateIndex> chi, std::size_t n) {
  std::vector<bool> in(n, false);
  for (StateIndex x : chi)
    if (x < n) in[x] = true;
  return in;
}

std::size_t max_state(std::span<const Trace> traces, std::span<const StateIndex> chi) {
  std::size_t m = 0;
  for (const auto& tr : traces) {
    m = std::max<std::size_t>(m, tr.initial_state);
    for (const auto& r : tr.jumps) m = std::max<std::size_t>(m, r.state);
    for (auto s : tr.checkpoint_states) m = std::max<std::size_t>(m, s);
    m = std::max<std::size_t>(m, tr.final_state);
  }
  for (auto x : chi) m = std::max<std::size_t>(m, x);
  return m + 1;
}

SuccessCurve finish_curve(std::vector<double> times, std::vector<std::size_t> hits,
                          std::vector<double> eval_sums, std::size_t K) {
  SuccessCurve curve;
  curve.checkpoints = std::move(times);
  curve.replicates = K;
  for (std::size_t i = 0; i < curve.checkpoints.size(); ++i) {
    curve.success.push_back(K ? static_cast<double>(hits[i]) / static_cast<double>(K) : 0.0);
    curve.interval.push_back(wilson_interval(hits[i], K));
    curve.evals.push_back(K ? eval_sums[i] / static_cast<double>(K) : 0.0);
  }
  return curve;
}

}  // namespace

SuccessCurve empirical_success(std::span<const Trace> traces, std::span<const StateIndex> chi,
                               std::span<const double> times) {
  const auto in = membership(chi, max_state(traces, chi));
  const double t_max = times.empty() ? 0.0 : *std::max_element(times.begin(), times.end());
  for (const auto& tr : traces)
    if (tr.horizon() < t_max)
      throw std::invalid_argument("empirical_success: trace horizon " + std::to_string(tr.horizon()) +
                                  " does not cover checkpoint " + std::to_string(t_max));
  std::vector<std::size_t> hits(times.size(), 0);
  std::vector<double> evals(times.size(), 0.0);
  for (const auto& tr : traces) {
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (in[tr.state_at(times[i])]) ++hits[i];
      evals[i] += static_cast<double>(tr.evals_at(times[i]));
    }
  }
  return finish_curve({times.begin(), times.end()}, std::move(hits), std::move(evals), traces.size());
}

SuccessCurve success_from_checkpoints(std::span<const Trace> traces,
                                      std::span<const StateIndex> chi,
                                      std::span<const double> times) {
  const auto in = membership(chi, max_state(traces, chi));
  std::vector<double> sorted(times.begin(), times.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> hits(sorted.size(), 0);
  std::vector<double> evals(sorted.size(), 0.0);
  for (const auto& tr : traces) {
    if (tr.checkpoint_states.size() != sorted.size())
      throw std::invalid_argument("success_from_checkpoints: trace was recorded with other checkpoints");
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (in[tr.checkpoint_states[i]]) ++hits[i];
      evals[i] += static_cast<double>(tr.checkpoint_evals[i]);
    }
  }
  return finish_curve(std::move(sorted), std::move(hits), std::move(evals), traces.size());
}

void write_success_csv(std::ostream& out, const SuccessCurve& curve) {
  out << "t,success,ci_lo,ci_hi,mean_evals,replicates\n";
  out << std::setprecision(12);
  for (std::size_t i = 0; i < curve.checkpoints.size(); ++i) {
    out << curve.checkpoints[i] << ',' << curve.success[i] << ',' << curve.interval[i].lo << ','
        << curve.interval[i].hi << ',' << curve.evals[i] << ',' << curve.replicates << '\n';
  }
}

nlohmann::json success_to_json(const SuccessCurve& curve) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < curve.checkpoints.size(); ++i)
    rows.push_back({{"t", curve.checkpoints[i]},
                    {"success", curve.success[i]},
                    {"ci", {curve.interval[i].lo, curve.interval[i].hi}},
                    {"mean_evals", curve.evals[i]}});
  return {{"replicates", curve.replicates}, {"curve", std::move(rows)}};
}

SandwichReport acceptance_sandwich(const CostOracle& oracle, StateIndex x, StateIndex y, double beta,
                                   double n, double delta, std::size_t repeats, Rng& rng) {
  if (x == y) throw std::invalid_argument("acceptance_sandwich: x and y must differ");
  if (!oracle.exact_J) throw std::invalid_argument("acceptance_sandwich: oracle has no exact costs");
  if (repeats < 2) throw std::invalid_argument("acceptance_sandwich: need at least 2 repeats");
  const auto& J = *oracle.exact_J;
  if (is_infeasible(J[x]) || is_infeasible(J[y]))
    throw std::invalid_argument("acceptance_sandwich: both states must be feasible");

  double mean = 0.0, m2 = 0.0;
  for (std::size_t r = 1; r <= repeats; ++r) {
    const std::uint64_t N = draw_batch_size(n, rng);
    const double jx = estimate_cost(oracle, x, N, rng).mean;
    const double jy = estimate_cost(oracle, y, N, rng).mean;
    const double v = acceptance_probability(jy - jx, beta);
    const double d = v - mean;
    mean += d / static_cast<double>(r);
    m2 += d * (v - mean);
  }
  SandwichReport rep;
  rep.estimate = mean;
  rep.standard_error = std::sqrt(m2 / static_cast<double>(repeats - 1) / static_cast<double>(repeats));
  rep.exact = acceptance_probability(J[y] - J[x], beta);
  rep.ratio = rep.estimate / rep.exact;
  rep.ratio_se = rep.standard_error / rep.exact;
  const double sigma = oracle.sigma > 0.0 ? oracle.sigma : 2.0 * oracle.bound_M;
  if (sigma > 0.0 && n > 0.0) {
    rep.bounds = epsilon_bounds(beta, n, sigma, delta);
  }
  rep.lower = 1.0 + rep.bounds.eps_minus - 3.0 * rep.ratio_se;
  rep.upper = 1.0 + rep.bounds.eps_plus + 3.0 * rep.ratio_se;
  rep.pass = rep.ratio >= rep.lower && rep.ratio <= rep.upper;
  return rep;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("total_variation: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double stationarity_distance(std::span<const Trace> traces, const FiniteSpace& space,
                             std::span<const double> cost, double beta, double burn_in) {
  if (!(burn_in >= 0.0 && burn_in < 1.0))
    throw std::invalid_argument("stationarity_distance: burn-in fraction must lie in [0, 1)");
  const GibbsMeasure target = stationary_measure(space, cost, beta);
  std::vector<double> counts(space.size(), 0.0);
  double total = 0.0;
  for (const auto& tr : traces) {
    const std::size_t n = tr.jumps.size();
    const auto skip = static_cast<std::size_t>(std::floor(burn_in * static_cast<double>(n)));
    if (n == 0) {
      counts[tr.initial_state] += 1.0;
      total += 1.0;
      continue;
    }
    for (std::size_t i = skip; i < n; ++i) {
      counts[tr.jumps[i].state] += 1.0;
      total += 1.0;
    }
  }
  if (total == 0.0) throw std::invalid_argument("stationarity_distance: no samples after burn-in");
  for (double& c : counts) c /= total;
  return total_variation(counts, target.mass);
}

BudgetReport budget_check(std::span<const Trace> traces, const ScheduleParams& params, double T) {
  BudgetReport rep;
  rep.horizon = T;
  const CallBound bound = expected_call_bound(T, params);
  rep.bound = bound.tight;
  rep.loose_bound = bound.loose;
  double sum = 0.0;
  for (const auto& tr : traces) {
    double s = 0.0;
    double start = 0.0;
    for (const auto& r : tr.jumps) {
      if (start >= T) break;
      s += static_cast<double>(r.batch);
      start = r.t;
    }
    sum += s;
  }
  rep.mean_batch_sum = traces.empty() ? 0.0 : sum / static_cast<double>(traces.size());
  rep.margin = rep.bound - rep.mean_batch_sum;
  rep.pass = rep.mean_batch_sum <= rep.bound;
  return rep;
}

nlohmann::json budget_to_json(const BudgetReport& report) {
  return {{"horizon", report.horizon},       {"mean_batch_sum", report.mean_batch_sum},
          {"bound", report.bound},           {"loose_bound", report.loose_bound},
          {"margin", report.margin},         {"pass", report.pass}};
}

double two_proportion_z(std::size_t s1, std::size_t n1, std::size_t s2, std::size_t n2) {
  if (n1 == 0 || n2 == 0) return 0.0;
  const double p1 = static_cast<double>(s1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(s2) / static_cast<double>(n2);
  const double pooled = static_cast<double>(s1 + s2) / static_cast<double>(n1 + n2);
  const double se = std::sqrt(pooled * (1.0 - pooled) *
                              (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
  if (se == 0.0) return 0.0;
  return (p1 - p2) / se;
}

double normal_quantile_two_sided(double level) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("normal_quantile_two_sided: level must lie in (0, 1)");
  // Bisection on erfc; accurate to ~1e-12.
  const double target = level;
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::erfc(mid / std::sqrt(2.0)) > target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace nsa
