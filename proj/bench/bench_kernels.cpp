// Serial reference vs OpenMP kernels on disk domains of growing size.
// Set OMP_NUM_THREADS to control the parallel side.

#include <benchmark/benchmark.h>

#include "polyreg/bregman.hpp"
#include "polyreg/field_calculus.hpp"
#include "polyreg/registration.hpp"

using namespace polyreg;

namespace {

struct Fixture {
  std::shared_ptr<const Domain> domain;
  MatrixField u;
  ScalarImage image;

  explicit Fixture(int n)
      : domain(std::make_shared<const Domain>(Domain::disk(Grid(-1, 1, -1, 1, n, n), Disk{}))),
        u(rotation_field(0.3, domain)),
        image(render_blobs(domain->grid(), random_blobs(3, 7, Disk{}))) {
    const MatrixField bump = random_smooth_field(domain, 2, 1);
    for (std::size_t i = 0; i < u.values().size(); ++i) u.values()[i] += 0.02 * bump.values()[i];
  }
};

Exec exec_of(const benchmark::State& state) {
  return state.range(1) == 0 ? Exec::serial : Exec::parallel;
}

void BM_Energy(benchmark::State& state) {
  const Fixture fx(static_cast<int>(state.range(0)));
  const Integrand f = rotation_energy(4.0);
  for (auto _ : state) benchmark::DoNotOptimize(energy(fx.u, f, exec_of(state)).value);
}

void BM_EnergyGradient(benchmark::State& state) {
  const Fixture fx(static_cast<int>(state.range(0)));
  const Integrand f = rotation_energy(4.0);
  std::vector<double> g(fx.u.values().size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(energy_and_gradient(fx.u, f, g, exec_of(state)));
    benchmark::ClobberMemory();
  }
}

void BM_Warp(benchmark::State& state) {
  const Fixture fx(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(warp(fx.image, fx.u, WarpMode::clamp, exec_of(state)).samples().data());
  }
}

void BM_Bregman(benchmark::State& state) {
  const Fixture fx(static_cast<int>(state.range(0)));
  const Integrand f = pq_energy(4.0, 2.0);
  const MatrixField base = rotation_field(0.3, fx.domain);
  const PolySubgradient w = poly_subgradient(f, base);
  for (auto _ : state) benchmark::DoNotOptimize(bregman_poly(f, fx.u, base, w, exec_of(state)));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int n : {64, 128, 256}) {
    for (int parallel : {0, 1}) b->Args({n, parallel});
  }
  b->ArgNames({"n", "omp"})->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(BM_Energy)->Apply(sizes);
BENCHMARK(BM_EnergyGradient)->Apply(sizes);
BENCHMARK(BM_Warp)->Apply(sizes);
BENCHMARK(BM_Bregman)->Apply(sizes);

BENCHMARK_MAIN();
