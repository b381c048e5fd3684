// Serial-reference vs OpenMP comparison for the scan kernels. The serial
// path is the one the tests pin the parallel path against, bit for bit.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "campanato/dirichlet.hpp"
#include "campanato/norms.hpp"
#include "campanato/operator_engine.hpp"
#include "campanato/potentials.hpp"

using namespace campanato;

namespace {

constexpr double kPi = 3.14159265358979323846;

GridFunction wavy(const GridDomain& d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> amp;
  double a = amp(rng), b = amp(rng), c = amp(rng);
  return sample(d, [=](const std::array<double, 3>& x) {
    double v = c;
    for (int ax = 0; ax < d.dim; ++ax)
      v += a * std::cos(2.0 * kPi * x[ax] / d.half_width) + b * std::sin(kPi * x[ax]);
    return v;
  });
}

Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Exec::Serial : Exec::Parallel;
}

void BM_morrey_scan_1d(benchmark::State& state) {
  GridDomain d(1, 1.0, 4096, Boundary::Periodic);
  BallFamily fam = BallFamily::make_default(d);
  NormParams params{2.0, 0.5, 2.0};
  GridFunction f = wavy(d, 1);
  for (auto _ : state) benchmark::DoNotOptimize(morrey_norm(f, params, fam, exec_of(state)));
}

void BM_morrey_scan_2d(benchmark::State& state) {
  GridDomain d(2, 1.0, 64, Boundary::Periodic);
  BallFamily fam = BallFamily::make_default(d);
  NormParams params{2.0, 1.0, 2.0};
  GridFunction f = wavy(d, 2);
  for (auto _ : state) benchmark::DoNotOptimize(morrey_norm(f, params, fam, exec_of(state)));
}

void BM_campanato_operator(benchmark::State& state) {
  GridDomain d(1, 1.0, 512, Boundary::TruncatedDirichlet);
  OperatorSpec spec;
  spec.kind = OperatorKind::Schrodinger;
  spec.potential = sample(d, [](const std::array<double, 3>&) { return 1.0; });
  auto eng = OperatorEngine::build(spec, d);
  BallFamily fam = BallFamily::make_default(d);
  NormParams params{2.0, 0.5, 2.0};
  GridFunction f = wavy(d, 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(campanato_operator(f, eng, params, fam, exec_of(state)));
}

void BM_reverse_holder(benchmark::State& state) {
  GridDomain d(2, 1.0, 64, Boundary::TruncatedDirichlet);
  PotentialSpec pl;
  pl.kind = PotentialSpec::Kind::PowerLaw;
  pl.exponent = 2.0;
  GridFunction V = make_potential(pl, d);
  BallFamily fam = BallFamily::make_default(d);
  for (auto _ : state)
    benchmark::DoNotOptimize(reverse_holder_constant(V, 2.0, fam, exec_of(state)));
}

void BM_poisson_extension(benchmark::State& state) {
  GridDomain d(1, 1.0, 512, Boundary::TruncatedDirichlet);
  OperatorSpec spec;
  spec.kind = OperatorKind::Schrodinger;
  spec.order_m = 1.0;
  spec.potential = sample(d, [](const std::array<double, 3>&) { return 1.0; });
  auto eng = OperatorEngine::build(spec, d);
  HeightGrid hg(d, 2.0 * d.spacing(), 0.5, 200);
  GridFunction f = wavy(d, 4);
  for (auto _ : state) benchmark::DoNotOptimize(poisson_extension(eng, f, hg, exec_of(state)));
}

void BM_carleson(benchmark::State& state) {
  GridDomain d(1, 1.0, 512, Boundary::Periodic);
  OperatorSpec spec;
  spec.order_m = 1.0;
  auto eng = OperatorEngine::build(spec, d);
  HeightGrid hg(d, 2.0 * d.spacing(), 0.5, 100);
  BallFamily fam = BallFamily::make_default(d);
  NormParams params{2.0, 0.5, 1.0};
  auto field = poisson_extension(eng, wavy(d, 5), hg);
  for (auto _ : state)
    benchmark::DoNotOptimize(carleson_functional(field, params, fam, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_morrey_scan_1d)->Arg(0)->Arg(1)->ArgNames({"omp"});
BENCHMARK(BM_morrey_scan_2d)->Arg(0)->Arg(1)->ArgNames({"omp"});
BENCHMARK(BM_campanato_operator)->Arg(0)->Arg(1)->ArgNames({"omp"});
BENCHMARK(BM_reverse_holder)->Arg(0)->Arg(1)->ArgNames({"omp"});
BENCHMARK(BM_poisson_extension)->Arg(0)->Arg(1)->ArgNames({"omp"});
BENCHMARK(BM_carleson)->Arg(0)->Arg(1)->ArgNames({"omp"});

BENCHMARK_MAIN();
