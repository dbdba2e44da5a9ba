// Serial reference paths against the OpenMP kernels. Arg 0 is serial, 1 parallel.

#include "capfl/classic.hpp"
#include "capfl/constellation.hpp"
#include "capfl/cuts.hpp"
#include "capfl/families.hpp"
#include "capfl/sa.hpp"

#include <benchmark/benchmark.h>

using namespace capfl;

namespace {

FamilyId fam(Family f, int n = 4) {
  FamilyId id;
  id.family = f;
  id.n = n;
  return id;
}

void BM_SolveIp(benchmark::State& state) {
  const Instance inst = gen_instance(fam(Family::EffcapCfl));
  IpOptions opt;
  opt.parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_ip(inst, opt));
}
BENCHMARK(BM_SolveIp)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BuildSa(benchmark::State& state) {
  const Instance inst(ProblemKind::CFL, {{Rational(0), 2}, {Rational(1), 2}}, std::vector<Client>(3, Client{1}));
  const LinearProgram base = build_classic(inst).lp;
  SaOptions opt;
  opt.parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(build_sa(base, 2, opt));
}
BENCHMARK(BM_BuildSa)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SampleCuts(benchmark::State& state) {
  const Instance inst = gen_instance(fam(Family::EffcapCfl));
  SamplingOptions opt;
  opt.parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_cuts(inst, CutKind::Submodular, 1000, 0, opt));
}
BENCHMARK(BM_SampleCuts)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EnumerateRounds(benchmark::State& state) {
  const Rounds r = build_rounds_lbfl(4, 2);
  const bool parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_rounds_lbfl(4, 2, r.phi, r.xi, 5'000'000, parallel));
}
BENCHMARK(BM_EnumerateRounds)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SampleProjection(benchmark::State& state) {
  const Rounds r = build_rounds_cfl(4, 1);
  const bool parallel = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_projection(r.instance, r.classes, r.solution, 20000, 0, parallel));
  }
}
BENCHMARK(BM_SampleProjection)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
