// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures. Tolerances and seeds are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nsa/cost_model.hpp"
#include "nsa/diagnostics.hpp"
#include "nsa/engine.hpp"
#include "nsa/landscape.hpp"
#include "nsa/problems.hpp"
#include "nsa/schedule.hpp"
#include "nsa/state_space.hpp"
#include "oracles.hpp"

using namespace nsa;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

FiniteSpace space_of(const oracle::Graph& g) {
  std::vector<std::vector<StateIndex>> adj(g.size());
  for (std::size_t v = 0; v < g.size(); ++v)
    for (int u : g[v]) adj[v].push_back(static_cast<StateIndex>(u));
  return uniform_space(adj);
}

std::size_t hits(const EnsembleResult& r, const std::vector<StateIndex>& chi) {
  std::set<StateIndex> in(chi.begin(), chi.end());
  std::size_t h = 0;
  for (const auto& tr : r.traces) h += in.count(tr.final_state);
  return h;
}

// ---------------------------------------------------------------------------

Outcome kernel_fidelity() {
  Rng graph_rng(101);
  const auto g = oracle::random_connected_graph(20, 0.15, graph_rng);
  const auto space = space_of(g);
  std::vector<double> J(20);
  for (auto& v : J) v = graph_rng.uniform(0.0, 3.0);
  const CostOracle zero = make_oracle(J, {NoiseKind::none, 0.0});
  const std::vector<double> betas = {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0};

  std::size_t pairs = 0, mismatches = 0, expected = 0;
  Rng rng(102);
  for (double beta : betas) {
    const Cooling cooling = Cooling::frozen(beta, 7.0);
    for (StateIndex x = 0; x < 20; ++x) {
      std::set<StateIndex> want;
      for (const auto& p : space.neighbors(x)) want.insert(p.to);
      expected += want.size();
      std::set<StateIndex> seen;
      ChainState s;
      s.x = x;
      s.beta = beta;
      for (int it = 0; it < 100000 && seen.size() < want.size(); ++it) {
        const auto out = nsa_step(s, space, zero, cooling, rng);
        const auto& r = out.record;
        const double noisy = acceptance_probability(r.j_hat_candidate - r.j_hat_current, r.beta);
        const double exact = classical_acceptance(J, x, r.candidate, beta);
        if (r.j_hat_current != J[x] || r.j_hat_candidate != J[r.candidate] || noisy != exact) ++mismatches;
        seen.insert(r.candidate);
      }
      pairs += seen.size();
    }
  }
  return {mismatches == 0 && pairs == expected,
          fmt("%zu/%zu (x, y, beta) triples covered, %zu mismatches", pairs, expected, mismatches)};
}

Outcome stationarity() {
  const double tol = 0.02;
  const auto two = uniform_space({{1}, {0}});
  const std::vector<double> J2 = {0.0, 1.0};
  Rng rng_a(201);
  const Trace a = run_nsa(two, make_oracle(J2, {NoiseKind::none, 0.0}), Cooling::frozen(std::numbers::ln2, 1.0),
                          StopRule::iterations(100000), rng_a);
  const double tv2 = stationarity_distance(std::span(&a, 1), two, J2, std::numbers::ln2, 0.2);

  const auto ring = uniform_space({{4, 1}, {0, 2}, {1, 3}, {2, 4}, {3, 0}});
  const std::vector<double> J5 = {0.0, 1.0, 2.0, 3.0, 4.0};
  Rng rng_b(202);
  const Trace b = run_nsa(ring, make_oracle(J5, {NoiseKind::none, 0.0}), Cooling::frozen(0.0, 1.0),
                          StopRule::iterations(100000), rng_b);
  const double tv5 = stationarity_distance(std::span(&b, 1), ring, J5, 0.0, 0.2);
  return {tv2 <= tol && tv5 <= tol, fmt("TV two-state %.4f, 5-cycle %.4f (limit %.2f)", tv2, tv5, tol)};
}

Outcome m_star_exact() {
  Rng rng(301);
  int bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(7));
    const auto g = oracle::random_connected_graph(n, rng.uniform(0.0, 0.7), rng);
    std::vector<double> J(n);
    for (auto& v : J) v = static_cast<double>(rng.below(17)) / 4.0;
    const auto space = space_of(g);
    const auto H = elevation_matrix(space, J);
    const double ref = oracle::brute_m_star(g, J);
    const double hs_ref = oracle::brute_m_star_hs(g, J);
    if (m_star(space, J) != ref || m_star(H, J) != ref || m_star_hs(H, J) != ref || hs_ref != ref) ++bad;
  }
  return {bad == 0, fmt("200 landscapes, %d disagreements", bad)};
}

Outcome gap_scaling() {
  const std::vector<double> J = {1.0, 2.0, 0.0, 1.0};
  const auto space = line_space(4);
  const double ms = m_star(space, J);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int points = 11;
  for (int i = 0; i < points; ++i) {
    const double beta = 2.0 + 0.8 * i;
    const double y = std::log(spectral_gap(space, J, beta));
    sx += beta;
    sy += y;
    sxx += beta * beta;
    sxy += beta * y;
  }
  const double slope = (points * sxy - sx * sy) / (points * sxx - sx * sx);
  return {ms == 1.0 && std::abs(slope + 1.0) <= 0.1, fmt("m* = %g, slope %.4f (target -1 +- 0.1)", ms, slope)};
}

Outcome poisson_tail() {
  const double a = poisson_tail_constant(0.5);
  bool ok = std::abs(a - 0.153426) < 1e-6;
  std::string detail = fmt("a(0.5) = %.6f;", a);
  Rng rng(501);
  const int draws = 100000;
  for (double n : {10.0, 50.0, 200.0}) {
    int low = 0;
    for (int i = 0; i < draws; ++i) low += static_cast<double>(poisson(n, rng)) <= 0.5 * n ? 1 : 0;
    const double p = static_cast<double>(low) / draws;
    const double bound = std::exp(-a * n);
    const double limit = bound + 3.0 * std::sqrt(bound * (1.0 - bound) / draws);
    ok = ok && p <= limit;
    detail += fmt(" n=%g: %.5f <= %.5f;", n, p, limit);
  }
  return {ok, detail};
}

Outcome sandwich() {
  // Hajek landscape lifted by the noise half-width so costs stay >= 0.
  const double h = 0.25;
  auto base = hajek_problem(9, 1.0, {});
  std::vector<double> J = base.exact_J;
  for (auto& v : J) v += h;
  const CostOracle oracle = bounded_noise_oracle(J, h);
  const auto opt = optimal_params(base.meta.m_star, 0.5, 0.01);
  ScheduleParams sp;
  sp.b = opt.b;
  sp.alpha = opt.alpha;
  sp.d = 0.05;
  const StateIndex x = 2, y = 3;  // local minimum and its uphill neighbour
  Rng rng(601);
  bool ok = true;
  std::string detail;
  for (double t : {10.0, 100.0, 1000.0}) {
    const double beta = beta_at(sp, t), n = n_at(sp, t);
    const auto r = acceptance_sandwich(oracle, x, y, beta, n, 0.5, 100000, rng);
    ok = ok && r.pass;
    detail += fmt(" t=%g: %.4f in [%.4g, %.4g];", t, r.ratio, r.lower, r.upper);
  }
  return {ok, detail};
}

Outcome gibbs_concentration() {
  const auto p = ackley_1d({});
  const auto& J = p.exact_J;
  bool ok = true;
  double worst = 0.0;
  int checks = 0;
  for (double eps : {0.5, 1.0, 2.0}) {
    const auto chi = chi_epsilon(J, eps);
    const double b = optimal_params(p.meta.m_star, eps, 0.01).b;
    std::set<StateIndex> in(chi.begin(), chi.end());
    for (int k = 0; k < 10; ++k) {
      const double t = std::pow(10.0, k);
      const double beta = b * std::log1p(t);
      const auto mu = gibbs_measure(J, beta);
      double outside = 0.0;
      for (std::size_t s = 0; s < J.size(); ++s)
        if (!in.count(static_cast<StateIndex>(s))) outside += mu.mass[s];
      const double bound = gibbs_tail_bound(J.size(), chi.size(), b, eps, 1.0, t);
      ok = ok && outside <= bound;
      worst = std::max(worst, outside / bound);
      ++checks;
    }
  }
  return {ok, fmt("%d (eps, t) points, max tail/bound ratio %.3g", checks, worst)};
}

Outcome hajek_reproduction() {
  const std::size_t K = 200;
  const double w = 1.0, T = 1e4;
  ScheduleParams sp;
  sp.b = 0.7;
  sp.d = 1.0;
  EnsembleOptions opts;
  opts.replicates = K;
  opts.seed = 801;
  opts.run.record_jumps = false;
  const auto chi = chi_epsilon(hajek_problem(9, w, {}).exact_J, 0.0);

  auto run = [&](double sd, EngineSpec engine, double alpha) {
    const auto p = hajek_problem(9, w, {sd > 0 ? NoiseKind::gaussian : NoiseKind::none, sd});
    ScheduleParams s = sp;
    s.alpha = alpha;
    return hits(run_replicates(p.space, p.oracle, Cooling::from(s), engine, StopRule::horizon(T), opts), chi);
  };
  const std::size_t classical = run(0.0, {EngineKind::classical, 1}, 2.0);
  std::string detail = fmt("classical %.3f;", classical / double(K));
  std::vector<std::size_t> quad, lin, fixed1;
  for (double sd : {0.0, 0.5 * w, 2.0 * w}) {
    quad.push_back(run(sd, {EngineKind::nsa, 1}, 2.0));
    lin.push_back(run(sd, {EngineKind::nsa, 1}, 1.0));
    fixed1.push_back(run(sd, {EngineKind::fixed_n, 1}, 0.0));
    detail += fmt(" sd=%g: quad %.3f lin %.3f N=1 %.3f;", sd, quad.back() / double(K), lin.back() / double(K),
                  fixed1.back() / double(K));
  }
  const double z99 = normal_quantile_two_sided(0.01);
  const bool a = std::abs(static_cast<double>(quad[2]) - static_cast<double>(classical)) / K <= 0.1;
  const double drop = (static_cast<double>(fixed1[0]) - static_cast<double>(fixed1[2])) / K;
  const bool b = drop >= 0.2 && two_proportion_z(fixed1[0], K, fixed1[2], K) > z99;
  bool c = true;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto ql = wilson_interval(quad[i], K), ll = wilson_interval(lin[i], K);
    c = c && ll.lo <= ql.hi && ql.lo <= ll.hi;
  }
  detail += fmt(" (a) %s (b) drop %.3f %s (c) %s", a ? "ok" : "no", drop, b ? "ok" : "no", c ? "ok" : "no");
  return {a && b && c, detail};
}

Outcome ackley_reproduction() {
  const std::size_t K = 200;
  const double T = 1e5;
  const StateIndex start = 1100;  // x ~ 10, inside the central funnel
  EnsembleOptions opts;
  opts.replicates = K;
  opts.seed = 901;
  opts.run.record_jumps = false;
  opts.run.initial_state = start;
  const auto chi = chi_epsilon(ackley_1d({}).exact_J, 1.0);

  auto run = [&](double sd, SamplingVariant sampling, double alpha) {
    const auto p = ackley_1d({sd > 0 ? NoiseKind::gaussian : NoiseKind::none, sd});
    ScheduleParams sp;
    sp.b = 0.3;
    sp.d = 1.0;
    sp.alpha = alpha;
    sp.sampling = sampling;
    return hits(run_replicates(p.space, p.oracle, Cooling::from(sp), {}, StopRule::horizon(T), opts), chi);
  };
  const std::vector<double> sds = {0.0, 5.0, 20.0};
  std::vector<std::size_t> quad, logn;
  std::string detail;
  for (double sd : sds) {
    quad.push_back(run(sd, SamplingVariant::power, 2.0));
    logn.push_back(run(sd, SamplingVariant::logarithmic, 2.0));
    detail += fmt(" sd=%g: quad %.3f log %.3f;", sd, quad.back() / double(K), logn.back() / double(K));
  }
  // Largest pairwise spread beyond its 99% sampling margin.
  const double z99 = normal_quantile_two_sided(0.01);
  double spread = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) {
      const double pi = quad[i] / double(K), pj = quad[j] / double(K);
      const double se = std::sqrt((pi * (1 - pi) + pj * (1 - pj)) / K);
      spread = std::max(spread, std::abs(pi - pj) - z99 * se);
    }
  const double z98 = normal_quantile_two_sided(0.02);  // one-sided 0.01
  const bool monotone = two_proportion_z(logn[0], K, logn[1], K) > z98 &&
                        two_proportion_z(logn[1], K, logn[2], K) > z98;
  detail += fmt(" quad CI-adjusted spread %.3f, log monotone %s", spread, monotone ? "yes" : "no");
  return {spread <= 0.1 && monotone, detail};
}

Outcome budget() {
  ScheduleParams sp;
  sp.alpha = 2.0;
  sp.d = 1.0;
  sp.b = 1.0;
  const auto p = hajek_problem(9, 1.0, {NoiseKind::gaussian, 1.0});
  EnsembleOptions opts;
  opts.replicates = 200;
  opts.seed = 1001;
  const auto ens = run_replicates(p.space, p.oracle, Cooling::from(sp), {}, StopRule::horizon(5.0), opts);
  const auto r = budget_check(ens.traces, sp, 5.0);
  return {r.pass && r.bound == 180.0, fmt("mean sum N_k %.2f <= bound %.0f", r.mean_batch_sum, r.bound)};
}

Outcome t_star_consistency() {
  bool ok = true;
  int cases = 0;
  double worst = 0.0;
  const double delta = 0.1;
  for (std::size_t chi : {5u, 8u, 10u}) {  // Gamma_2 = 1, 0.25, 0
    for (double gamma : {0.01, 0.1}) {
      for (double alpha : {1.5, 2.0 * (1.0 + gamma), 3.0}) {
        for (double d : {0.5, 1.0, 2.0}) {
          const double ms = 1.0, eps = 0.5;
          const auto rc = RateConstants::make(ms, eps, delta, gamma, 10, chi);
          ScheduleParams sp;
          sp.alpha = alpha;
          sp.d = d;
          sp.b = optimal_params(ms, eps, gamma).b;
          const double T = t_star(rc, sp);
          const auto terms = convergence_bound(rc, sp, T);
          const double half = delta / 2.0;
          const double slack = 1e-12;
          ok = ok && terms.sampling <= half * (1 + slack) && terms.concentration <= half * (1 + slack);
          // The binding term sits exactly on delta/2 unless Gamma_2 = 0.
          if (rc.Gamma_2 > 0.0) {
            const double binding = std::max(terms.sampling / rc.Gamma_2, terms.concentration);
            ok = ok && std::abs(binding - half) <= 1e-9 * half;
            worst = std::max(worst, std::abs(binding - half) / half);
          }
          ++cases;
        }
      }
    }
  }
  return {ok, fmt("%d configurations with Gamma_2 <= 1, max relative deviation %.2g", cases, worst)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "kernel_fidelity", 1.0, kernel_fidelity},
      {2, "fixed_beta_stationarity", 10.0, stationarity},
      {3, "m_star_exact", 30.0, m_star_exact},
      {4, "spectral_gap_scaling", 10.0, gap_scaling},
      {5, "poisson_tail", 10.0, poisson_tail},
      {6, "acceptance_sandwich", 120.0, sandwich},
      {7, "gibbs_concentration", 5.0, gibbs_concentration},
      {8, "hajek_reproduction", 600.0, hajek_reproduction},
      {9, "ackley_reproduction", 900.0, ackley_reproduction},
      {10, "budget_bound", 60.0, budget},
      {11, "t_star_consistency", 1.0, t_star_consistency},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = out.pass && secs <= c.limit_s;
    failures += pass ? 0 : 1;
    std::printf("%s %2d %-24s %s [%.2fs / %.0fs]\n", pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(),
                secs, c.limit_s);
    std::fflush(stdout);
  }
  return failures;
}
