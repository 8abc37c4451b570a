#include <benchmark/benchmark.h>

#include <vector>

#include "nsa/cost_model.hpp"
#include "nsa/engine.hpp"
#include "nsa/landscape.hpp"
#include "nsa/problems.hpp"
#include "nsa/schedule.hpp"

namespace {

void BM_NsaStep(benchmark::State& st) {
  const auto p = nsa::ackley_1d({nsa::NoiseKind::gaussian, 5.0});
  nsa::ScheduleParams sp;
  sp.b = 0.5;
  const auto cooling = nsa::Cooling::from(sp);
  nsa::Rng rng(1);
  nsa::ChainState s;
  s.x = 1000;
  s.t = static_cast<double>(st.range(0));
  s.beta = nsa::beta_at(sp, s.t);
  for (auto _ : st) {
    auto out = nsa::nsa_step(s, p.space, p.oracle, cooling, rng);
    benchmark::DoNotOptimize(out.record.accepted);
    s.x = out.state.x;
  }
}
BENCHMARK(BM_NsaStep)->Arg(1)->Arg(10)->Arg(100);

void BM_Poisson(benchmark::State& st) {
  nsa::Rng rng(2);
  const double lambda = static_cast<double>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(nsa::poisson(lambda, rng));
}
BENCHMARK(BM_Poisson)->Arg(1)->Arg(30)->Arg(1000)->Arg(100000);

void BM_MStar(benchmark::State& st) {
  const auto p = nsa::ackley_1d({}, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(nsa::m_star(p.space, p.exact_J));
}
BENCHMARK(BM_MStar)->Arg(200)->Arg(2000)->Arg(20000);

void BM_SpectralGap(benchmark::State& st) {
  const auto p = nsa::hajek_problem(static_cast<std::size_t>(st.range(0)), 1.0, {});
  for (auto _ : st) benchmark::DoNotOptimize(nsa::spectral_gap(p.space, p.exact_J, 4.0));
}
BENCHMARK(BM_SpectralGap)->Arg(21)->Arg(101)->Arg(401);

}  // namespace

BENCHMARK_MAIN();
