#include <benchmark/benchmark.h>

#include "vpw/ensemble.hpp"
#include "vpw/field.hpp"
#include "vpw/rng.hpp"

using namespace vpw;

namespace {

SourceSet cloud(std::size_t n) {
  Stream rng(3, 0);
  SourceSet s;
  for (std::size_t i = 0; i < n; ++i) {
    s.y.push_back(Vec3(rng.normal(), rng.normal(), 4.0 + rng.normal()));
    s.q.push_back(1.0 / double(n));
  }
  return s;
}

void BM_evaluate(benchmark::State& st, ConvexDomain d, bool grad) {
  const SourceSet src = cloud(std::size_t(st.range(0)));
  FieldSolver fs(GreenKernel::for_domain(d, 0.05));
  for (auto _ : st) benchmark::DoNotOptimize(fs.evaluate(src, src.y, grad));
  st.SetComplexityN(st.range(0));
  st.counters["pairs/s"] = benchmark::Counter(double(st.range(0)) * double(st.range(0)), benchmark::Counter::kIsIterationInvariantRate);
}

void BM_reconstruct(benchmark::State& st) {
  const SourceSet src = cloud(std::size_t(st.range(0)));
  GreenKernel k = GreenKernel::for_domain(ConvexDomain::half_space(), 0.05);
  const Vec3 x(0.5, 0.2, 3.0);
  for (auto _ : st) benchmark::DoNotOptimize(reconstruct_E(k, src, x));
}

}  // namespace

BENCHMARK_CAPTURE(BM_evaluate, halfspace_E, ConvexDomain::half_space(), false)->RangeMultiplier(4)->Range(256, 4096)->Complexity();
BENCHMARK_CAPTURE(BM_evaluate, halfspace_gradE, ConvexDomain::half_space(), true)->RangeMultiplier(4)->Range(256, 4096);
BENCHMARK_CAPTURE(BM_evaluate, corner_E, ConvexDomain::corner(), false)->RangeMultiplier(4)->Range(256, 1024);
BENCHMARK(BM_reconstruct)->RangeMultiplier(4)->Range(256, 4096);

BENCHMARK_MAIN();
