#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "nsa/engine.hpp"

using namespace nsa;

namespace {

FiniteSpace two_state() { return uniform_space({{1}, {0}}); }

FiniteSpace cycle(std::size_t n) {
  std::vector<std::vector<StateIndex>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    adj[i] = {static_cast<StateIndex>((i + n - 1) % n), static_cast<StateIndex>((i + 1) % n)};
  return uniform_space(adj);
}

std::vector<double> occupation(const Trace& tr, std::size_t n, double burn_in) {
  std::vector<double> c(n, 0.0);
  const auto skip = static_cast<std::size_t>(burn_in * static_cast<double>(tr.jumps.size()));
  for (std::size_t i = skip; i < tr.jumps.size(); ++i) c[tr.jumps[i].state] += 1.0;
  const double tot = static_cast<double>(tr.jumps.size() - skip);
  for (double& v : c) v /= tot;
  return c;
}

double tv(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace

TEST(Acceptance, Formula) {
  EXPECT_EQ(acceptance_probability(-3.0, 5.0), 1.0);
  EXPECT_EQ(acceptance_probability(0.0, 5.0), 1.0);
  EXPECT_EQ(acceptance_probability(2.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(acceptance_probability(1.0, std::log(2.0)), 0.5);
  EXPECT_EQ(acceptance_probability(kInfeasible, 0.0), 0.0);
}

TEST(NsaStep, DownhillAlwaysAccepted) {
  const auto space = two_state();
  const auto oracle = gaussian_noise_oracle({1.0, 0.0}, 0.0);
  const auto cool = Cooling::frozen(50.0, 3.0);
  Rng rng(1);
  ChainState s;
  for (int i = 0; i < 1000; ++i) {
    s.x = 0;
    EXPECT_TRUE(nsa_step(s, space, oracle, cool, rng).record.accepted);
  }
}

TEST(NsaStep, BetaZeroAcceptsEverything) {
  const auto space = two_state();
  const auto oracle = gaussian_noise_oracle({0.0, 100.0}, 5.0);
  const auto cool = Cooling::frozen(0.0, 2.0);
  Rng rng(2);
  ChainState s;
  for (int i = 0; i < 1000; ++i) {
    s.x = 0;
    EXPECT_TRUE(nsa_step(s, space, oracle, cool, rng).record.accepted);
  }
}

TEST(NsaStep, Ln2GivesHalf) {
  const auto space = two_state();
  const auto oracle = gaussian_noise_oracle({0.0, 1.0}, 0.0);
  const auto cool = Cooling::frozen(std::log(2.0), 1.0);
  Rng rng(3);
  int acc = 0;
  const int n = 100000;
  ChainState s;
  s.beta = std::log(2.0);
  for (int i = 0; i < n; ++i) acc += nsa_step(s, space, oracle, cool, rng).record.accepted ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(acc) / n, 0.5, 0.005);
}

TEST(NsaStep, BookkeepingAndInfeasibleCandidate) {
  const auto space = two_state();
  const auto oracle = gaussian_noise_oracle({0.0, kInfeasible}, 1.0);
  const auto cool = Cooling::from({1.0, 1.0, 2.0});
  Rng rng(4);
  ChainState s;
  for (int i = 0; i < 200; ++i) {
    const auto out = nsa_step(s, space, oracle, cool, rng);
    EXPECT_FALSE(out.record.accepted);
    EXPECT_EQ(out.state.x, 0u);
    EXPECT_GT(out.state.t, s.t);
    EXPECT_EQ(out.state.evals, s.evals + 2 * out.record.batch);
    EXPECT_EQ(out.state.k, s.k + 1);
    EXPECT_DOUBLE_EQ(out.state.beta, std::log1p(out.state.t));
    EXPECT_DOUBLE_EQ(out.record.beta, std::log1p(s.t));
    s = out.state;
  }
}

TEST(NsaStep, PostJumpClockUsesNewBeta) {
  const auto space = two_state();
  const auto oracle = gaussian_noise_oracle({0.0, 1.0}, 0.0);
  const auto cool = Cooling::from({1.0, 1.0, 1.0});
  Rng rng(5);
  ChainState s;
  const auto out = nsa_step(s, space, oracle, cool, rng, AcceptanceClock::post_jump);
  EXPECT_DOUBLE_EQ(out.record.beta, std::log1p(out.state.t));
}

TEST(NsaStep, FixedDrawOrderReproducible) {
  const auto space = cycle(7);
  const auto oracle = gaussian_noise_oracle({0, 1, 2, 3, 2, 1, 0.5}, 1.0);
  const auto cool = Cooling::from({1.0, 1.0, 2.0});
  Rng a(77), b(77);
  const auto t1 = run_nsa(space, oracle, cool, StopRule::iterations(300), a);
  const auto t2 = run_nsa(space, oracle, cool, StopRule::iterations(300), b);
  ASSERT_EQ(t1.jumps.size(), t2.jumps.size());
  for (std::size_t i = 0; i < t1.jumps.size(); ++i) {
    EXPECT_EQ(t1.jumps[i].state, t2.jumps[i].state);
    EXPECT_EQ(t1.jumps[i].t, t2.jumps[i].t);
    EXPECT_EQ(t1.jumps[i].j_hat_candidate, t2.jumps[i].j_hat_candidate);
  }
}

TEST(RunNsa, BetaZeroRandomWalkIsUniform) {
  const auto space = cycle(6);
  const auto oracle = gaussian_noise_oracle({0, 5, 1, 4, 2, 3}, 0.0);
  Rng rng(6);
  const auto tr = run_nsa(space, oracle, Cooling::frozen(0.0), StopRule::iterations(200000), rng);
  EXPECT_LT(tv(occupation(tr, 6, 0.2), std::vector<double>(6, 1.0 / 6)), 0.05);
}

TEST(RunNsa, MaxEvalsAccounting) {
  const auto space = cycle(5);
  const auto oracle = gaussian_noise_oracle({0, 1, 2, 1, 0.5}, 0.3);
  Rng rng(7);
  const auto tr = run_nsa(space, oracle, Cooling::from({1.0, 1.0, 2.0}), StopRule::evals(5000), rng);
  ASSERT_FALSE(tr.jumps.empty());
  EXPECT_LE(tr.oracle_evals, 5000 + 2 * tr.jumps.back().batch);
  std::uint64_t sum = 0;
  for (const auto& r : tr.jumps) sum += 2 * r.batch;
  EXPECT_EQ(sum, tr.oracle_evals);
}

TEST(RunNsa, SingleStateIsConstant) {
  const auto space = uniform_space({{0}});
  const auto oracle = gaussian_noise_oracle({2.0}, 1.0);
  Rng rng(8);
  const auto tr = run_nsa(space, oracle, Cooling::from({1.0, 1.0, 1.0}), StopRule::iterations(100), rng);
  for (const auto& r : tr.jumps) EXPECT_EQ(r.state, 0u);
}

TEST(RunNsa, InfeasibleInitialRejected) {
  auto space = cycle(4);
  const std::vector<double> J = {0, kInfeasible, 1, 1};
  space.restrict_feasible(J);
  const auto oracle = gaussian_noise_oracle(J, 0.0);
  Rng rng(9);
  RunOptions opt;
  opt.initial_state = 1;
  EXPECT_THROW(run_nsa(space, oracle, Cooling::frozen(1.0), StopRule::iterations(5), rng, opt),
               std::invalid_argument);
}

TEST(RunNsa, NeverVisitsInfeasible) {
  auto space = cycle(8);
  const std::vector<double> J = {0, kInfeasible, 1, 2, kInfeasible, 1, 3, 2};
  space.restrict_feasible(J);
  // Feasible set is not connected along the cycle here, but absorption must hold anyway.
  const auto oracle = gaussian_noise_oracle(J, 2.0);
  Rng rng(10);
  const auto tr = run_nsa(space, oracle, Cooling::frozen(0.0, 1.0), StopRule::iterations(20000), rng);
  for (const auto& r : tr.jumps) EXPECT_FALSE(is_infeasible(J[r.state]));
}

TEST(RunNsa, JumpCountIsPoisson) {
  const auto space = cycle(3);
  const auto oracle = gaussian_noise_oracle({0, 1, 2}, 0.0);
  const double T = 20.0;
  const int runs = 1000;
  double total = 0.0;
  for (int i = 0; i < runs; ++i) {
    Rng rng = Rng::stream(11, i);
    const auto tr = run_nsa(space, oracle, Cooling::frozen(1.0), StopRule::horizon(T), rng);
    // The last recorded jump overshoots T.
    total += static_cast<double>(tr.jumps.size() - 1);
  }
  EXPECT_NEAR(total / runs, T, 3.0 * std::sqrt(T / runs));
}

TEST(RunNsa, HorizonStateAndInterpolation) {
  const auto space = cycle(5);
  const auto oracle = gaussian_noise_oracle({0, 1, 2, 1, 0.5}, 0.0);
  Rng rng(12);
  RunOptions opt;
  opt.checkpoints = {0.5, 3.0, 9.99};
  const auto tr = run_nsa(space, oracle, Cooling::from({1.0, 1.0, 1.0}), StopRule::horizon(10.0), rng, opt);
  EXPECT_EQ(tr.final_state, tr.state_at(10.0));
  ASSERT_EQ(tr.checkpoint_states.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(tr.checkpoint_states[i], tr.state_at(opt.checkpoints[i]));
    EXPECT_EQ(tr.checkpoint_evals[i], tr.evals_at(opt.checkpoints[i]));
  }
  for (std::size_t i = 1; i < tr.jumps.size(); ++i) EXPECT_GT(tr.jumps[i].t, tr.jumps[i - 1].t);
}

TEST(ClassicalSa, FixedBetaMatchesGibbs) {
  const auto space = cycle(5);
  const std::vector<double> J = {0.0, 1.0, 0.5, 2.0, 0.2};
  const double beta = 1.3;
  Rng rng(13);
  const auto tr = run_classical_sa(space, J, Cooling::frozen(beta), StopRule::iterations(300000), rng);
  EXPECT_EQ(tr.oracle_evals, 0u);
  EXPECT_LT(tv(occupation(tr, 5, 0.2), gibbs_measure(J, beta).mass), 0.05);
}

TEST(ClassicalSa, ConstantCostIsRandomWalk) {
  const auto space = cycle(4);
  const std::vector<double> J(4, 1.0);
  Rng rng(14);
  const auto tr = run_classical_sa(space, J, Cooling::frozen(100.0), StopRule::iterations(1000), rng);
  for (const auto& r : tr.jumps) EXPECT_TRUE(r.accepted);
}

TEST(ClassicalSa, HugeBetaPins) {
  const auto space = two_state();
  const std::vector<double> J = {0.0, 1.0};
  Rng rng(15);
  RunOptions opt;
  opt.initial_state = 1;
  const auto tr = run_classical_sa(space, J, Cooling::frozen(1e9), StopRule::iterations(1000), rng, opt);
  EXPECT_EQ(tr.jumps.front().state, 0u);
  for (const auto& r : tr.jumps) EXPECT_EQ(r.state, 0u);
}

TEST(ClassicalSa, AcceptanceMatchesZeroNoiseNsa) {
  const auto space = cycle(6);
  const std::vector<double> J = {0, 0.3, 1.7, 0.9, 2.2, 0.1};
  const auto oracle = gaussian_noise_oracle(J, 0.0);
  for (StateIndex x = 0; x < 6; ++x)
    for (StateIndex y = 0; y < 6; ++y)
      for (double beta : {0.0, 0.5, 3.0}) {
        const double exact = classical_acceptance(J, x, y, beta);
        Rng rng(x * 100 + y);
        const auto ex = estimate_cost(oracle, x, 1 + rng.below(9), rng).mean;
        const auto ey = estimate_cost(oracle, y, 1 + rng.below(9), rng).mean;
        EXPECT_EQ(acceptance_probability(ey - ex, beta), exact);
      }
}

TEST(FixedSampleSa, EvalsAccounting) {
  const auto space = cycle(5);
  const auto oracle = gaussian_noise_oracle({0, 1, 2, 1, 0.5}, 1.0);
  Rng rng(16);
  const auto tr = run_fixed_sample_sa(space, oracle, Cooling::from({1.0, 1.0, 2.0}), 3,
                                      StopRule::iterations(250), rng);
  EXPECT_EQ(tr.oracle_evals, 2u * 3u * 250u);
  for (const auto& r : tr.jumps) EXPECT_EQ(r.batch, 3u);
}

TEST(FixedSampleSa, ZeroNoiseMatchesClassicalLaw) {
  const auto space = cycle(5);
  const std::vector<double> J = {0.0, 1.0, 0.5, 2.0, 0.2};
  const auto oracle = gaussian_noise_oracle(J, 0.0);
  Rng rng(17);
  const auto tr = run_fixed_sample_sa(space, oracle, Cooling::frozen(1.0), 1, StopRule::iterations(300000), rng);
  EXPECT_LT(tv(occupation(tr, 5, 0.2), gibbs_measure(J, 1.0).mass), 0.05);
}

TEST(Replicates, SingleReplicateWinner) {
  const auto space = cycle(5);
  const auto oracle = gaussian_noise_oracle({0, 1, 2, 1, 0.5}, 0.5);
  EnsembleOptions opt;
  opt.replicates = 1;
  opt.seed = 3;
  const auto res = run_replicates(space, oracle, Cooling::from({1.0, 1.0, 2.0}), {}, StopRule::horizon(5.0), opt);
  EXPECT_EQ(res.winner, res.final_states[0]);
  EXPECT_EQ(res.winner_replicate, 0u);
  EXPECT_GE(res.selection_batch, 1u);
  EXPECT_EQ(res.selection_evals, res.selection_batch);
}

TEST(Replicates, DeterministicAcrossWorkerCounts) {
  const auto space = cycle(9);
  const auto oracle = gaussian_noise_oracle({0, 1, 2, 3, 4, 3, 2, 1, 0.5}, 1.0);
  EnsembleOptions a;
  a.replicates = 12;
  a.seed = 42;
  a.workers = 1;
  EnsembleOptions b = a;
  b.workers = 4;
  const auto cool = Cooling::from({1.0, 1.0, 2.0});
  const auto r1 = run_replicates(space, oracle, cool, {}, StopRule::horizon(8.0), a);
  const auto r2 = run_replicates(space, oracle, cool, {}, StopRule::horizon(8.0), b);
  ASSERT_EQ(r1.traces.size(), r2.traces.size());
  for (std::size_t i = 0; i < r1.traces.size(); ++i) {
    std::ostringstream s1, s2;
    write_trace_csv(s1, r1.traces[i]);
    write_trace_csv(s2, r2.traces[i]);
    EXPECT_EQ(s1.str(), s2.str());
  }
  EXPECT_EQ(r1.winner, r2.winner);
  EXPECT_EQ(r1.selection_estimates, r2.selection_estimates);
}

TEST(Replicates, ClassicalNeedsExactCosts) {
  const auto space = cycle(3);
  CostOracle o;
  o.sample = [](StateIndex, Rng&) { return 0.0; };
  EnsembleOptions opt;
  EXPECT_THROW(run_replicates(space, o, Cooling::frozen(1.0), {EngineKind::classical, 1}, StopRule::iterations(3), opt),
               std::invalid_argument);
}

TEST(TraceCsv, Header) {
  const auto space = cycle(3);
  const auto oracle = gaussian_noise_oracle({0, 1, 2}, 0.0);
  Rng rng(18);
  const auto tr = run_nsa(space, oracle, Cooling::frozen(1.0), StopRule::iterations(4), rng);
  std::ostringstream os;
  write_trace_csv(os, tr);
  const auto text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "k,t_k,state,accepted,N_k,J_hat_current,J_hat_candidate,beta,cum_evals");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
}

TEST(StopRule, Validation) {
  EXPECT_THROW(StopRule::horizon(0.0).validate(), std::invalid_argument);
  EXPECT_THROW(StopRule::iterations(0).validate(), std::invalid_argument);
  EXPECT_NO_THROW(StopRule::evals(1).validate());
}

TEST(EngineKind, Names) {
  EXPECT_EQ(engine_kind_from_string("fixed_N"), EngineKind::fixed_n);
  EXPECT_STREQ(to_string(EngineKind::classical), "classical");
  EXPECT_THROW(engine_kind_from_string("glauber"), std::invalid_argument);
}
