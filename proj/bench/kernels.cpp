// Parallel kernels against their serial references.
#include <benchmark/benchmark.h>

#include "paramodular/hecke_local.hpp"
#include "paramodular/theta.hpp"

using namespace paramodular;

namespace {

const SmallMatrix& e8_small() {
  static SmallMatrix m = to_small(e8_gram());
  return m;
}

const ThetaInput& chain_in() {
  static ThetaInput in = [] {
    QuadLattice E(e8_gram());
    auto subs = pmodular_sublattices(E, 2);
    return chain_input(make_chain(E, {subs.front().coords}, {1, 2}));
  }();
  return in;
}

void BM_neighbors(benchmark::State& st) {
  LocalShape s{3, 1, 1};
  for (auto _ : st) benchmark::DoNotOptimize(enumerate_neighbors(s));
}
void BM_neighbors_reference(benchmark::State& st) {
  LocalShape s{3, 1, 1};
  for (auto _ : st) benchmark::DoNotOptimize(enumerate_neighbors_reference(s));
}

void BM_short_vectors(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(enumerate_short(e8_small(), st.range(0)));
}
void BM_short_vectors_reference(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(enumerate_short_reference(e8_small(), st.range(0)));
}

void BM_norm_counts(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(norm_counts(e8_small(), st.range(0)));
}
void BM_norm_counts_reference(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(norm_counts_reference(e8_small(), st.range(0)));
}

void BM_theta_join(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(theta_coefficients(chain_in(), st.range(0), st.range(0)));
}
void BM_theta_join_reference(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(theta_coefficients_reference(chain_in(), st.range(0)));
}

void BM_hecke_levels(benchmark::State& st) {
  LocalShape s{2, 1, 1};
  for (auto _ : st) benchmark::DoNotOptimize(hecke_levels(s, 2));
}
void BM_hecke_levels_reference(benchmark::State& st) {
  LocalShape s{2, 1, 1};
  for (auto _ : st) benchmark::DoNotOptimize(hecke_levels_reference(s, 2));
}

}  // namespace

BENCHMARK(BM_neighbors)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_neighbors_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_short_vectors)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_short_vectors_reference)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_norm_counts)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_norm_counts_reference)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_theta_join)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_theta_join_reference)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hecke_levels)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hecke_levels_reference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
