#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kinslab/parallel.hpp"
#include "kinslab/solver.hpp"
#include "oracles.hpp"

using namespace kinslab;

namespace {

Walls diffuse_walls(const VelocityGrid& sv, double theta = 1.0) {
  return {make_wall_spec(sv, Wall::left, theta, LocalReflectKind::specular,
                         AccommodationLaw::constant(1.0)),
          make_wall_spec(sv, Wall::right, theta, LocalReflectKind::specular,
                         AccommodationLaw::constant(1.0))};
}

double total_mass(const DistributionFunction& f, const SpatialGrid& sx,
                  const VelocityGrid& sv) {
  double m = 0.0;
  for (int i = 0; i < f.nx; ++i)
    for (int j = 0; j < f.nv; ++j) m += f.at(i, j) * sv.weights[j] * sx.dx;
  return m;
}

DistributionFunction random_state(std::mt19937_64& gen, const SpatialGrid& sx,
                                  const VelocityGrid& sv, double scale = 1.0) {
  DistributionFunction f(sx.cell_count, sv.node_count);
  std::uniform_real_distribution<double> u(0.0, scale);
  for (double& v : f.values) v = u(gen);
  return f;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("initial conditions: positivity and normalization") {
  const SpatialGrid sx = build_spatial_grid(1.0, 32);
  const VelocityGrid sv = build_velocity_grid(8.0, 128);

  InitialCondition ic;
  ic.preset = InitialCondition::Preset::maxwellian;
  const DistributionFunction f = initial_condition(ic, sx, sv);
  CHECK(f.min_value() >= 0.0);
  CHECK(total_mass(f, sx, sv) == doctest::Approx(1.0 * sx.length).epsilon(1e-9));
  // f(x, v) = (2 pi)^{-1/2} e^{-v^2/2}
  CHECK(f.at(3, 64) ==
        doctest::Approx(std::exp(-sv.nodes[64] * sv.nodes[64] / 2.0) /
                        std::sqrt(2.0 * std::numbers::pi))
            .epsilon(1e-14));

  InitialCondition box;
  box.preset = InitialCondition::Preset::uniform_box;
  box.box_x0 = 0.25;
  box.box_x1 = 0.75;
  box.box_w = 2.0;
  box.box_value = 3.0;
  const DistributionFunction fb = initial_condition(box, sx, sv);
  CHECK(fb.min_value() == 0.0);
  // direct summation oracle for the box mass
  std::vector<long double> terms;
  for (int i = 0; i < fb.nx; ++i)
    for (int j = 0; j < fb.nv; ++j)
      terms.push_back(static_cast<long double>(fb.at(i, j)) * sv.weights[j] * sx.dx);
  CHECK(total_mass(fb, sx, sv) ==
        doctest::Approx(oracle::reordered_sum(terms)).epsilon(1e-13));

  InitialCondition bump;
  bump.preset = InitialCondition::Preset::two_bump;
  bump.u0 = 2.0;
  bump.temperature = 0.5;
  bump.xmod_amp = 0.5;
  CHECK(initial_condition(bump, sx, sv).min_value() >= 0.0);

  InitialCondition bad;
  bad.temperature = -1.0;
  CHECK_THROWS_AS(initial_condition(bad, sx, sv), std::invalid_argument);
  bad = InitialCondition{};
  bad.xmod_amp = 1.5;
  CHECK_THROWS_AS(initial_condition(bad, sx, sv), std::invalid_argument);
}

TEST_CASE("transport: wall Maxwellian is a discrete fixed point") {
  const SpatialGrid sx = build_spatial_grid(1.0, 32);
  const VelocityGrid sv = build_velocity_grid(8.0, 64);
  const Walls walls = diffuse_walls(sv);

  DistributionFunction f(sx.cell_count, sv.node_count);
  for (int i = 0; i < f.nx; ++i)
    for (int j = 0; j < f.nv; ++j) f.at(i, j) = 0.7 * walls.left.wq.m[j];
  const DistributionFunction f0 = f;

  const double dt = 0.9 * max_dt_transport(sx, sv);
  for (int s = 0; s < 100; ++s) transport_step(f, sx, sv, walls, dt);
  double err = 0.0;
  for (std::size_t k = 0; k < f.values.size(); ++k)
    err = std::max(err, std::abs(f.values[k] - f0.values[k]));
  CHECK(err < 1e-12);
}

TEST_CASE("transport: unit-CFL pulse translates exactly") {
  const SpatialGrid sx = build_spatial_grid(1.0, 16);
  const VelocityGrid sv = build_velocity_grid(1.0, 4);  // nodes +-0.25, +-0.75
  const Walls walls = diffuse_walls(sv);

  DistributionFunction f(sx.cell_count, sv.node_count);
  f.at(2, 3) = 1.0;  // node v = 0.75 is the fastest
  const double dt = sx.dx / 0.75;
  const int k = 5;
  for (int s = 0; s < k; ++s) transport_step(f, sx, sv, walls, dt);
  for (int i = 0; i < f.nx; ++i)
    CHECK(f.at(i, 3) == (i == 2 + k ? 1.0 : 0.0));
}

TEST_CASE("transport: mass is conserved to roundoff across laws") {
  const SpatialGrid sx = build_spatial_grid(1.0, 16);
  const VelocityGrid sv = build_velocity_grid(4.0, 16);
  auto gen = oracle::rng(31);
  for (double alpha : {0.25, 1.0}) {
    Walls walls{make_wall_spec(sv, Wall::left, 1.0, LocalReflectKind::specular,
                               AccommodationLaw::constant(alpha)),
                make_wall_spec(sv, Wall::right, 0.5, LocalReflectKind::specular,
                               AccommodationLaw::flux_dependent(0.3, 1.0))};
    DistributionFunction f = random_state(gen, sx, sv);
    const double m0 = total_mass(f, sx, sv);
    const double dt = 0.9 * max_dt_transport(sx, sv);
    for (int s = 0; s < 200; ++s) {
      transport_step(f, sx, sv, walls, dt);
      CHECK(std::abs(total_mass(f, sx, sv) - m0) / m0 <= 1e-12);
      CHECK(f.min_value() >= 0.0);
    }
  }
}

TEST_CASE("transport: CFL violation is refused with the required dt") {
  const SpatialGrid sx = build_spatial_grid(1.0, 8);
  const VelocityGrid sv = build_velocity_grid(2.0, 8);
  const Walls walls = diffuse_walls(sv);
  DistributionFunction f(sx.cell_count, sv.node_count);
  CHECK_THROWS_WITH_AS(transport_step(f, sx, sv, walls, 1.0),
                       doctest::Contains("dt must be <="), std::invalid_argument);
}

TEST_CASE("fokker-planck: disabled operator is the identity") {
  const SpatialGrid sx = build_spatial_grid(1.0, 4);
  const VelocityGrid sv = build_velocity_grid(4.0, 32);
  auto gen = oracle::rng(41);
  DistributionFunction f = random_state(gen, sx, sv);
  const DistributionFunction f0 = f;
  fokker_planck_step(f, sx, sv, 1e-3, 0.0, 0.0, nullptr);
  CHECK(f.values == f0.values);
}

TEST_CASE("fokker-planck: the bath Gaussian is stationary to roundoff") {
  // lambda > 0, nu = lambda Theta: the exponential-fitted flux reproduces the
  // nodewise Gaussian equilibrium exactly, so the defect sits at roundoff,
  // far below the scheme-truncation contract of 1e-6 at Nv = 256.
  for (int nv : {128, 256}) {
    const SpatialGrid sx = build_spatial_grid(1.0, 4);
    const VelocityGrid sv = build_velocity_grid(8.0, nv);
    const double lambda = 0.8, theta = 1.25, nu = lambda * theta;

    DistributionFunction f(sx.cell_count, sv.node_count);
    for (int i = 0; i < f.nx; ++i)
      for (int j = 0; j < f.nv; ++j)
        f.at(i, j) = std::exp(-sv.nodes[j] * sv.nodes[j] / (2.0 * theta));
    const DistributionFunction f0 = f;

    const double dt = 0.9 * max_dt_fokker_planck(sx, sv, nu, lambda, nullptr);
    for (int s = 0; s < 10; ++s) fokker_planck_step(f, sx, sv, dt, nu, lambda, nullptr);
    double err = 0.0;
    for (std::size_t k = 0; k < f.values.size(); ++k)
      err = std::max(err, std::abs(f.values[k] - f0.values[k]));
    CHECK(err < 1e-12);
  }
}

TEST_CASE("fokker-planck: per-cell mass conservation and positivity") {
  const SpatialGrid sx = build_spatial_grid(1.0, 8);
  const VelocityGrid sv = build_velocity_grid(6.0, 48);
  auto gen = oracle::rng(43);
  std::uniform_real_distribution<double> up(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double nu = trial % 3 == 0 ? 0.0 : 0.05 * (trial + 1);
    const double lambda = up(gen);
    std::vector<double> efield(sx.cell_count);
    for (double& e : efield) e = up(gen);

    DistributionFunction f = random_state(gen, sx, sv);
    std::vector<double> cell_mass(f.nx, 0.0);
    for (int i = 0; i < f.nx; ++i)
      for (int j = 0; j < f.nv; ++j) cell_mass[i] += f.at(i, j) * sv.weights[j];

    const double dt = 0.95 * max_dt_fokker_planck(sx, sv, nu, lambda, &efield);
    fokker_planck_step(f, sx, sv, dt, nu, lambda, &efield);
    CHECK(f.min_value() >= 0.0);
    for (int i = 0; i < f.nx; ++i) {
      double m = 0.0;
      for (int j = 0; j < f.nv; ++j) m += f.at(i, j) * sv.weights[j];
      CHECK(std::abs(m - cell_mass[i]) / std::max(cell_mass[i], 1e-300) <= 1e-12);
    }
  }
}

TEST_CASE("fokker-planck: CFL refusal") {
  const SpatialGrid sx = build_spatial_grid(1.0, 4);
  const VelocityGrid sv = build_velocity_grid(4.0, 32);
  DistributionFunction f(sx.cell_count, sv.node_count);
  const double limit = max_dt_fokker_planck(sx, sv, 0.5, 1.0, nullptr);
  CHECK_THROWS_AS(fokker_planck_step(f, sx, sv, 2.0 * limit, 0.5, 1.0, nullptr),
                  std::invalid_argument);
}

TEST_CASE("bgk: moment-matched Maxwellian is a fixed point") {
  const SpatialGrid sx = build_spatial_grid(1.0, 4);
  const VelocityGrid sv = build_velocity_grid(8.0, 64);
  InitialCondition ic;
  ic.preset = InitialCondition::Preset::two_bump;
  ic.u0 = 1.5;
  ic.temperature = 0.7;
  DistributionFunction f = initial_condition(ic, sx, sv);

  // replace each cell by its own moment-matched Maxwellian
  for (int i = 0; i < f.nx; ++i) {
    const std::vector<double> g = bgk_local_maxwellian(f, sv, i);
    for (int j = 0; j < f.nv; ++j) f.at(i, j) = g[j];
  }
  const DistributionFunction f0 = f;
  const BgkResult r = bgk_step(f, sx, sv, 0.5, 1.0);
  double err = 0.0;
  for (std::size_t k = 0; k < f.values.size(); ++k)
    err = std::max(err, std::abs(f.values[k] - f0.values[k]));
  CHECK(err < 1e-12);
  CHECK(std::abs(r.entropy_production) < 1e-12);
}

TEST_CASE("bgk: collision invariants conserved, entropy produced") {
  const SpatialGrid sx = build_spatial_grid(1.0, 16);
  const VelocityGrid sv = build_velocity_grid(8.0, 128);
  InitialCondition ic;
  ic.preset = InitialCondition::Preset::two_bump;
  ic.u0 = 2.0;
  ic.temperature = 0.5;
  ic.xmod_amp = 0.4;
  DistributionFunction f = initial_condition(ic, sx, sv);

  // long-double moment oracle per cell, before
  auto moments = [&](const DistributionFunction& g, int i) {
    std::vector<long double> m0, m1, m2;
    for (int j = 0; j < g.nv; ++j) {
      const long double fw = static_cast<long double>(g.at(i, j)) * sv.weights[j];
      m0.push_back(fw);
      m1.push_back(fw * sv.nodes[j]);
      m2.push_back(fw * sv.nodes[j] * sv.nodes[j]);
    }
    return std::array<double, 3>{oracle::reordered_sum(m0), oracle::reordered_sum(m1),
                                 oracle::reordered_sum(m2)};
  };
  std::vector<std::array<double, 3>> before(f.nx);
  for (int i = 0; i < f.nx; ++i) before[i] = moments(f, i);

  const BgkResult r = bgk_step(f, sx, sv, 0.4, 0.5);
  CHECK(r.entropy_production >= -1e-10);
  CHECK(f.min_value() >= 0.0);
  for (int i = 0; i < f.nx; ++i) {
    const std::array<double, 3> after = moments(f, i);
    const double scale = std::max(before[i][0], 1e-30);
    CHECK(std::abs(after[0] - before[i][0]) / scale <= 1e-10);
    CHECK(std::abs(after[1] - before[i][1]) / scale <= 1e-10);
    CHECK(std::abs(after[2] - before[i][2]) / scale <= 1e-10);
  }
}

TEST_CASE("bgk: entropy production non-negative on random positive states") {
  const SpatialGrid sx = build_spatial_grid(1.0, 6);
  const VelocityGrid sv = build_velocity_grid(6.0, 48);
  auto gen = oracle::rng(57);
  std::uniform_real_distribution<double> u(1e-6, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    DistributionFunction f(sx.cell_count, sv.node_count);
    for (double& v : f.values) v = u(gen);
    // nodewise H-theorem oracle: (G - f)(log G - log f) >= 0 summed
    double direct = 0.0;
    for (int i = 0; i < f.nx; ++i) {
      const std::vector<double> g = bgk_local_maxwellian(f, sv, i);
      for (int j = 0; j < f.nv; ++j)
        direct += (g[j] - f.at(i, j)) * (std::log(g[j]) - std::log(f.at(i, j))) *
                  sv.weights[j] * sx.dx;
    }
    CHECK(direct >= 0.0);
    const BgkResult r = bgk_step(f, sx, sv, 0.3, 1.0);
    CHECK(r.entropy_production >= -1e-10);
    CHECK(r.entropy_production == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("bgk: degenerate cell and stability guard are refused") {
  const SpatialGrid sx = build_spatial_grid(1.0, 3);
  const VelocityGrid sv = build_velocity_grid(4.0, 16);
  DistributionFunction f(sx.cell_count, sv.node_count);
  for (int i = 0; i < f.nx; ++i) f.at(i, 5) = 1.0;  // all mass in one node: T = 0
  CHECK_THROWS_WITH_AS(bgk_step(f, sx, sv, 0.1, 1.0), doctest::Contains("cell"),
                       std::runtime_error);
  DistributionFunction ok(sx.cell_count, sv.node_count);
  CHECK_THROWS_AS(bgk_step(ok, sx, sv, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("step: disabled physics is the identity after transport of nothing") {
  const SpatialGrid sx = build_spatial_grid(1.0, 16);
  const VelocityGrid sv = build_velocity_grid(4.0, 32);
  const Walls walls = diffuse_walls(sv);
  const ModelConfig cfg;  // everything off

  auto gen = oracle::rng(61);
  DistributionFunction f = random_state(gen, sx, sv);
  DistributionFunction g = f;

  const double dt = 0.5 * max_dt_transport(sx, sv);
  step(f, sx, sv, cfg, walls, dt);
  transport_step(g, sx, sv, walls, dt);
  CHECK(f.values == g.values);  // free-transport step is pure transport
}

TEST_CASE("step: full model runs and preserves positivity") {
  const SpatialGrid sx = build_spatial_grid(1.0, 32);
  const VelocityGrid sv = build_velocity_grid(8.0, 64);
  const Walls walls = diffuse_walls(sv);
  ModelConfig cfg;
  cfg.nu = 0.05;
  cfg.lambda = 0.5;
  cfg.poisson = true;
  cfg.bgk = true;
  cfg.tau = 0.5;

  InitialCondition ic;
  ic.preset = InitialCondition::Preset::two_bump;
  ic.u0 = 1.0;
  ic.temperature = 0.8;
  ic.xmod_amp = 0.3;
  DistributionFunction f = initial_condition(ic, sx, sv);

  for (int s = 0; s < 10; ++s) {
    const double dt =
        0.5 * std::min(max_dt_transport(sx, sv),
                       max_dt_fokker_planck(sx, sv, cfg.nu, cfg.lambda, nullptr));
    const StepReport rep = step(f, sx, sv, cfg, walls, dt);
    CHECK(rep.min_f >= 0.0);
    CHECK(rep.cfl_advection <= 1.0);
    CHECK(rep.field.has_value());
    CHECK(rep.bgk_entropy_production >= -1e-10);
  }
}

TEST_CASE("step: bit-identical across worker counts") {
  const SpatialGrid sx = build_spatial_grid(1.0, 24);
  const VelocityGrid sv = build_velocity_grid(6.0, 48);
  const Walls walls = diffuse_walls(sv);
  ModelConfig cfg;
  cfg.nu = 0.1;
  cfg.lambda = 1.0;
  cfg.poisson = true;

  InitialCondition ic;
  ic.preset = InitialCondition::Preset::maxwellian;
  ic.xmod_amp = 0.2;

  auto run = [&](int workers) {
    set_worker_count(workers);
    DistributionFunction f = initial_condition(ic, sx, sv);
    const double dt =
        0.5 * std::min(max_dt_transport(sx, sv),
                       max_dt_fokker_planck(sx, sv, cfg.nu, cfg.lambda, nullptr));
    for (int s = 0; s < 25; ++s) step(f, sx, sv, cfg, walls, dt);
    set_worker_count(1);
    return f.values;
  };
  const std::vector<double> a = run(1);
  const std::vector<double> b = run(4);
  CHECK(a == b);
}

}  // TEST_SUITE
