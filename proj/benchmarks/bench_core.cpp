#include <random>

#include <benchmark/benchmark.h>

#include "gpsabb/abb.hpp"
#include "gpsabb/cluster.hpp"
#include "gpsabb/gps.hpp"
#include "gpsabb/matching.hpp"
#include "gpsabb/support.hpp"

using namespace gpsabb;

namespace {

Dataset make_dataset(int n, int P, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Dataset d;
  d.Z = 3;
  d.X.resize(n, P);
  d.Y.resize(n);
  for (int i = 0; i < n; ++i) {
    const int w = 1 + i % 3;
    for (int p = 0; p < P; ++p) d.X(i, p) = 0.2 * (w - 1) + normal(rng);
    d.W.push_back(w);
    d.Y[i] = unif(rng) < 0.5 ? 1.0 : 0.0;
  }
  return d;
}

}  // namespace

static void BM_FitGps(benchmark::State& state) {
  Dataset d = make_dataset(static_cast<int>(state.range(0)), 10, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fit_gps(d));
}
BENCHMARK(BM_FitGps)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_Cluster(benchmark::State& state) {
  Dataset d = make_dataset(2000, 10, 2);
  GpsMatrix gps = predict_gps(fit_gps(d), d);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        cluster_logit_gps(gps, d.W, d.Z, static_cast<int>(state.range(0)), 7));
}
BENCHMARK(BM_Cluster)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_AbbImpute(benchmark::State& state) {
  Dataset d = make_dataset(2000, 10, 3);
  GpsMatrix gps = predict_gps(fit_gps(d), d);
  ClusterAssignment cl = cluster_logit_gps(gps, d.W, d.Z, 5, 7);
  for (auto _ : state) benchmark::DoNotOptimize(abb_impute(d, cl, 1, 25, 11));
}
BENCHMARK(BM_AbbImpute)->Unit(benchmark::kMillisecond);

static void BM_NnMatch(benchmark::State& state) {
  Dataset d = make_dataset(2000, 10, 4);
  GpsMatrix gps = predict_gps(fit_gps(d), d);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        nn_match(d, gps, 1, 1, DistanceKind::mahalanobis_logit_gps, true));
}
BENCHMARK(BM_NnMatch)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
