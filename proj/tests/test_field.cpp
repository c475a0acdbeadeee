#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kinslab/field.hpp"
#include "kinslab/solver.hpp"
#include "oracles.hpp"

using namespace kinslab;

TEST_SUITE("field") {

TEST_CASE("density moments of a unit Maxwellian") {
  const SpatialGrid sx = build_spatial_grid(1.0, 8);
  const VelocityGrid sv = build_velocity_grid(8.0, 256);
  DistributionFunction f(sx.cell_count, sv.node_count);
  for (int i = 0; i < f.nx; ++i)
    for (int j = 0; j < f.nv; ++j)
      f.at(i, j) = std::exp(-sv.nodes[j] * sv.nodes[j] / 2.0) /
                   std::sqrt(2.0 * std::numbers::pi);

  const Moments m = density_moments(f, sv);
  // oracle: full-line Gaussian moments with the cutoff
  const long double rho_ref =
      2.0L * oracle::gaussian_half_moment(0, 1.0L, 8.0L) /
      std::sqrt(2.0L * std::numbers::pi_v<long double>);
  const long double en_ref =
      oracle::gaussian_half_moment(2, 1.0L, 8.0L) /
      std::sqrt(2.0L * std::numbers::pi_v<long double>);
  for (int i = 0; i < f.nx; ++i) {
    CHECK(m.rho[i] == doctest::Approx(static_cast<double>(rho_ref)).epsilon(1e-6));
    CHECK(std::abs(m.current[i]) < 1e-15);
    CHECK(m.energy[i] == doctest::Approx(static_cast<double>(en_ref)).epsilon(1e-5));
    CHECK(m.energy[i] == doctest::Approx(0.5).epsilon(1e-4));
  }
}

TEST_CASE("density moments: vacuum and shifted Maxwellian") {
  const SpatialGrid sx = build_spatial_grid(1.0, 4);
  const VelocityGrid sv = build_velocity_grid(8.0, 256);
  DistributionFunction zero(sx.cell_count, sv.node_count);
  const Moments mz = density_moments(zero, sv);
  for (int i = 0; i < zero.nx; ++i) {
    CHECK(mz.rho[i] == 0.0);
    CHECK(mz.current[i] == 0.0);
    CHECK(mz.energy[i] == 0.0);
  }

  DistributionFunction f(sx.cell_count, sv.node_count);
  const double u = 0.5;
  for (int i = 0; i < f.nx; ++i)
    for (int j = 0; j < f.nv; ++j)
      f.at(i, j) = std::exp(-(sv.nodes[j] - u) * (sv.nodes[j] - u) / 2.0) /
                   std::sqrt(2.0 * std::numbers::pi);
  const Moments m = density_moments(f, sv);
  for (int i = 0; i < f.nx; ++i)
    CHECK(m.current[i] == doctest::Approx(u * m.rho[i]).epsilon(1e-8));
}

TEST_CASE("Poisson: zero source and the closed-form parabola") {
  const SpatialGrid sx = build_spatial_grid(1.0, 64);
  const FieldState z = solve_poisson(std::vector<double>(64, 0.0), sx);
  for (double v : z.potential) CHECK(v == 0.0);
  for (double e : z.grad_faces) CHECK(e == 0.0);
  CHECK(z.energy == 0.0);

  // -V'' = 1 on (0,1), V = x(1-x)/2
  const FieldState p = solve_poisson(std::vector<double>(64, 1.0), sx);
  double err = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double x = sx.centers[i];
    err = std::max(err, std::abs(p.potential[i] - 0.5 * x * (1.0 - x)));
  }
  CHECK(err < 0.5 * sx.dx * sx.dx);
}

TEST_CASE("Poisson: manufactured solution converges at second order") {
  double prev_err = 0.0;
  double worst_order = 10.0;
  bool first = true;
  for (int nx : {64, 128, 256}) {
    const SpatialGrid sx = build_spatial_grid(1.0, nx);
    std::vector<double> rho(nx);
    const double k = std::numbers::pi / sx.length;
    for (int i = 0; i < nx; ++i) rho[i] = k * k * std::sin(k * sx.centers[i]);
    const FieldState fs = solve_poisson(rho, sx);
    double err = 0.0;
    for (int i = 0; i < nx; ++i)
      err = std::max(err, std::abs(fs.potential[i] - std::sin(k * sx.centers[i])));
    if (!first) worst_order = std::min(worst_order, std::log2(prev_err / err));
    prev_err = err;
    first = false;
  }
  CHECK(worst_order >= 1.9);
}

TEST_CASE("Poisson: maximum principle and solve residual") {
  const SpatialGrid sx = build_spatial_grid(2.0, 48);
  auto gen = oracle::rng(23);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> rho(48);
    for (double& r : rho) r = u(gen);
    const FieldState fs = solve_poisson(rho, sx);
    for (double v : fs.potential) CHECK(v >= 0.0);
    CHECK(fs.residual <= 1e-12);
  }
}

TEST_CASE("field energy identity: static states and manufactured rate") {
  const int nx = 128;
  const SpatialGrid sx = build_spatial_grid(1.0, nx);

  // static state: both sides vanish
  std::vector<double> rho(nx, 1.0);
  FieldState a = solve_poisson(rho, sx);
  a.current.assign(nx, 0.0);
  FieldState b = a;
  CHECK(field_energy_identity_residual(a, b, sx, 1e-2, 1.0) <= 1e-10);

  // manufactured density rho(t,x) = 1 + a sin(wt) cos(2 pi x), exact current
  // from the continuity equation: j = -(a w / 2 pi) cos(wt) sin(2 pi x)
  const double amp = 0.25, omega = 3.0;
  auto make_state = [&](double t) {
    std::vector<double> r(nx), j(nx);
    for (int i = 0; i < nx; ++i) {
      const double x = sx.centers[i];
      r[i] = 1.0 + amp * std::sin(omega * t) * std::cos(2.0 * std::numbers::pi * x);
      j[i] = -(amp * omega / (2.0 * std::numbers::pi)) * std::cos(omega * t) *
             std::sin(2.0 * std::numbers::pi * x);
    }
    FieldState fs = solve_poisson(r, sx);
    fs.current = j;
    return fs;
  };

  const double t0 = 0.2;
  auto residual_at = [&](double dt) {
    return field_energy_identity_residual(make_state(t0), make_state(t0 + dt), sx,
                                          dt, 1.0);
  };
  const double r1 = residual_at(2e-3);
  const double r2 = residual_at(1e-3);
  CHECK(r1 > 0.0);
  const double ratio = r2 / r1;
  CHECK(ratio > 0.4);
  CHECK(ratio < 0.6);
}

TEST_CASE("poisson rejects bad input") {
  const SpatialGrid sx = build_spatial_grid(1.0, 16);
  CHECK_THROWS_AS(solve_poisson(std::vector<double>(8, 1.0), sx),
                  std::invalid_argument);
  std::vector<double> bad(16, 1.0);
  bad[3] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(solve_poisson(bad, sx), std::invalid_argument);
}

}  // TEST_SUITE
