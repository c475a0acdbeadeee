#include <benchmark/benchmark.h>

#include <random>

#include "kinslab/boundary.hpp"
#include "kinslab/field.hpp"
#include "kinslab/solver.hpp"

using namespace kinslab;

namespace {

struct Fixture {
  SpatialGrid sx = build_spatial_grid(1.0, 64);
  VelocityGrid sv = build_velocity_grid(8.0, 128);
  Walls walls{make_wall_spec(sv, Wall::left, 1.0, LocalReflectKind::specular,
                             AccommodationLaw::constant(0.5)),
              make_wall_spec(sv, Wall::right, 1.0, LocalReflectKind::specular,
                             AccommodationLaw::flux_dependent(0.3, 1.0))};

  DistributionFunction state() const {
    InitialCondition ic;
    ic.preset = InitialCondition::Preset::two_bump;
    ic.u0 = 2.0;
    ic.temperature = 0.5;
    ic.xmod_amp = 0.4;
    return initial_condition(ic, sx, sv);
  }

  std::vector<double> trace() const {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::vector<double> phi(walls.left.wq.half_size());
    for (double& v : phi) v = u(gen);
    return phi;
  }
};

const Fixture& fixture() {
  static Fixture f;
  return f;
}

}  // namespace

static void BM_maxwell_reflect(benchmark::State& state) {
  const Fixture& fx = fixture();
  const std::vector<double> phi = fx.trace();
  for (auto _ : state)
    benchmark::DoNotOptimize(maxwell_reflect(phi, fx.sv, fx.walls.left));
}
BENCHMARK(BM_maxwell_reflect);

static void BM_dg_information(benchmark::State& state) {
  const Fixture& fx = fixture();
  const std::vector<double> phi = fx.trace();
  for (auto _ : state)
    benchmark::DoNotOptimize(dg_information(phi, fx.walls.left.wq));
}
BENCHMARK(BM_dg_information);

static void BM_transport_step(benchmark::State& state) {
  const Fixture& fx = fixture();
  DistributionFunction f = fx.state();
  const double dt = 0.9 * max_dt_transport(fx.sx, fx.sv);
  for (auto _ : state) benchmark::DoNotOptimize(transport_step(f, fx.sx, fx.sv, fx.walls, dt));
}
BENCHMARK(BM_transport_step);

static void BM_fokker_planck_step(benchmark::State& state) {
  const Fixture& fx = fixture();
  DistributionFunction f = fx.state();
  const double dt = 0.9 * max_dt_fokker_planck(fx.sx, fx.sv, 0.1, 1.0, nullptr);
  for (auto _ : state) {
    fokker_planck_step(f, fx.sx, fx.sv, dt, 0.1, 1.0, nullptr);
    benchmark::DoNotOptimize(f.values.data());
  }
}
BENCHMARK(BM_fokker_planck_step);

static void BM_bgk_step(benchmark::State& state) {
  const Fixture& fx = fixture();
  DistributionFunction f = fx.state();
  for (auto _ : state)
    benchmark::DoNotOptimize(bgk_step(f, fx.sx, fx.sv, 0.1, 1.0));
}
BENCHMARK(BM_bgk_step);

static void BM_solve_poisson(benchmark::State& state) {
  const Fixture& fx = fixture();
  const Moments m = density_moments(fx.state(), fx.sv);
  for (auto _ : state) benchmark::DoNotOptimize(solve_poisson(m.rho, fx.sx));
}
BENCHMARK(BM_solve_poisson);

BENCHMARK_MAIN();
