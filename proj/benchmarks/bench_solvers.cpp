#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "dqhelmert/dqhelmert.hpp"
#include "reference_cases.hpp"

namespace {

using namespace dqhelmert;

enum Solver { kUnit, kScaled, kSimplified, kQa };

SolveResult Run(Solver solver, const Problem& p) {
  switch (solver) {
    case kUnit: return SolveConstrained(p);
    case kScaled: return SolveScaled(p);
    case kSimplified: return SolveSimplified(p);
    default: return SolveQa(p);
  }
}

// Noisy network of n points, unit weights.
Problem Synthetic(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1000.0, 1000.0);
  std::normal_distribution<double> noise(0.0, 0.01);
  const Quaternion r = UnitQuatFromEuler({0.3, -0.2, 0.9});
  const Mat3 rot = RotationFromUnitQuat(r);
  const Vec3 t(120.0, -45.0, 310.0);
  Problem p;
  for (int i = 0; i < n; ++i) {
    const Vec3 x(coord(rng), coord(rng), coord(rng));
    Vec3 X = t + 1.7 * rot * x;
    for (int k = 0; k < 3; ++k) X[k] += noise(rng);
    p.points.push_back({std::to_string(i), x, X});
  }
  return p;
}

void ReferenceCase(benchmark::State& state) {
  const Problem p = state.range(0) == 1 ? testing::Case1() : testing::Case2();
  const auto solver = static_cast<Solver>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(Run(solver, p));
}
BENCHMARK(ReferenceCase)
    ->ArgsProduct({{1, 2}, {kUnit, kScaled, kSimplified, kQa}})
    ->ArgNames({"case", "solver"})
    ->Unit(benchmark::kMicrosecond);

void NetworkSize(benchmark::State& state) {
  const Problem p = Synthetic(static_cast<int>(state.range(0)), 7);
  const auto solver = static_cast<Solver>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(Run(solver, p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(NetworkSize)
    ->ArgsProduct({{10, 20, 40, 80}, {kUnit, kSimplified, kQa}})
    ->ArgNames({"n", "solver"})
    ->Unit(benchmark::kMillisecond);

void Precision(benchmark::State& state) {
  const SolveResult result = SolveConstrained(testing::Case1());
  for (auto _ : state) benchmark::DoNotOptimize(Covariance(result));
}
BENCHMARK(Precision)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
