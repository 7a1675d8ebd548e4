#include <benchmark/benchmark.h>

#include "blowup/coupling.hpp"
#include "blowup/fitting.hpp"
#include "blowup/meshsim.hpp"
#include "blowup/profile.hpp"
#include "blowup/rates.hpp"
#include "blowup/spectral.hpp"

using namespace blowup;

static void BM_Profile(benchmark::State& st) {
  const ModelParams p{st.range(0) / 1.0, 1, {}};
  for (auto _ : st) benchmark::DoNotOptimize(solveProfile(p).h);
}
BENCHMARK(BM_Profile)->Arg(7)->Arg(8)->Arg(9)->Unit(benchmark::kMillisecond);

static void BM_Basis(benchmark::State& st) {
  const ModelParams p{8, 1, {}};
  for (auto _ : st) benchmark::DoNotOptimize(buildBasis(p, static_cast<int>(st.range(0))).orthoResidual);
}
BENCHMARK(BM_Basis)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_Coupling(benchmark::State& st) {
  const ModelParams p{st.range(0) / 1.0, 1, {}};
  const auto prof = solveProfile(p);
  const auto b = buildBasis(p, 4);
  for (auto _ : st) benchmark::DoNotOptimize(couplingConstants(prof, b, 1, 4).D[1]);
}
BENCHMARK(BM_Coupling)->Arg(7)->Arg(9)->Unit(benchmark::kMillisecond);

static void BM_Epsilon(benchmark::State& st) {
  const auto law = predictRate({7, 1, {}}, 1);
  const EpsilonConstants c{law.lambda, law.gamma, law.DN, law.cN, law.h, law.delta};
  for (auto _ : st) benchmark::DoNotOptimize(solveEpsilon(c, 0.1, 60.0).eps.back());
}
BENCHMARK(BM_Epsilon)->Unit(benchmark::kMillisecond);

// d=8 blow-up to |u_r| = 1e6 on a coarse mesh
static void BM_MeshRun(benchmark::State& st) {
  SimConfig c;
  c.d = 8;
  c.M = static_cast<int>(st.range(0));
  c.maxGradient = 1e6;
  for (auto _ : st) benchmark::DoNotOptimize(run(c).steps);
}
BENCHMARK(BM_MeshRun)->Arg(201)->Arg(401)->Unit(benchmark::kMillisecond);

static void BM_LogFit(benchmark::State& st) {
  SimConfig c;
  c.d = 7;
  c.M = 201;
  const auto tr = run(c);
  for (auto _ : st) benchmark::DoNotOptimize(fitLog(tr.t, tr.drU0).C);
}
BENCHMARK(BM_LogFit)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
