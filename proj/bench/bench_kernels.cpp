#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "nfbeam/geometry.hpp"
#include "nfbeam/kernels.hpp"

using namespace nfbeam;

namespace {

const PhysicalConstants& constants() {
  static const PhysicalConstants c = PhysicalConstants::make(10e9, 2e-3);
  return c;
}

ApertureLayout layout_for(benchmark::State& state) {
  return build_layout(static_cast<double>(state.range(0)) / 100.0, constants());
}

Eigen::VectorXcd random_moments(std::size_t n) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::VectorXcd m(static_cast<Eigen::Index>(2 * n));
  for (Eigen::Index i = 0; i < m.size(); ++i) m[i] = Complex(g(rng), g(rng));
  return m;
}

std::vector<Point3> axis_points(int count) {
  std::vector<Point3> pts;
  for (int i = 0; i < count; ++i) pts.push_back({0.01 * i, 0.0, 1.0 + 0.05 * i});
  return pts;
}

template <auto Kernel>
void BM_Coupling(benchmark::State& state) {
  const ApertureLayout l = layout_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(l.positions(), constants()));
  state.counters["N"] = static_cast<double>(l.size());
}

template <auto Kernel>
void BM_FieldGrid(benchmark::State& state) {
  const ApertureLayout l = layout_for(state);
  const Eigen::VectorXcd m = random_moments(l.size());
  const std::vector<Point3> pts = axis_points(64);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(l.positions(), m, pts, constants()));
  state.counters["N"] = static_cast<double>(l.size());
}

template <auto Kernel>
void BM_DetunedSum(benchmark::State& state) {
  const ApertureLayout l = layout_for(state);
  const std::vector<double> w(l.size(), 1.0);
  double offset = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Kernel(w, l.rho(), 1.0, offset, constants().wavenumber));
    offset += 1e-3;
  }
  state.counters["N"] = static_cast<double>(l.size());
}

}  // namespace

BENCHMARK(BM_Coupling<kernels::serial::assemble_coupling>)->Name("coupling/serial")->Arg(10)->Arg(20);
BENCHMARK(BM_Coupling<kernels::omp::assemble_coupling>)->Name("coupling/omp")->Arg(10)->Arg(20);
BENCHMARK(BM_FieldGrid<kernels::serial::field_grid>)->Name("field_grid/serial")->Arg(20)->Arg(40);
BENCHMARK(BM_FieldGrid<kernels::omp::field_grid>)->Name("field_grid/omp")->Arg(20)->Arg(40);
BENCHMARK(BM_DetunedSum<kernels::serial::detuned_sum>)->Name("detuned_sum/serial")->Arg(20)->Arg(40);
BENCHMARK(BM_DetunedSum<kernels::omp::detuned_sum>)->Name("detuned_sum/omp")->Arg(20)->Arg(40);

BENCHMARK_MAIN();
