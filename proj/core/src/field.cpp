#include "kinslab/field.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kinslab/solver.hpp"

namespace kinslab {

Moments density_moments(const DistributionFunction& f, const VelocityGrid& grid) {
  Moments m;
  m.rho.assign(f.nx, 0.0);
  m.current.assign(f.nx, 0.0);
  m.energy.assign(f.nx, 0.0);
  for (int i = 0; i < f.nx; ++i) {
    double rho = 0.0, cur = 0.0, en = 0.0;
    for (int j = 0; j < f.nv; ++j) {
      const double fw = f.at(i, j) * grid.weights[j];
      rho += fw;
      cur += fw * grid.nodes[j];
      en += fw * grid.nodes[j] * grid.nodes[j];
    }
    if (!std::isfinite(rho) || !std::isfinite(cur) || !std::isfinite(en))
      throw std::runtime_error("density_moments: non-finite moment");
    m.rho[i] = rho;
    m.current[i] = cur;
    m.energy[i] = 0.5 * en;
  }
  return m;
}

FieldState solve_poisson(const std::vector<double>& rho, const SpatialGrid& grid) {
  const int n = grid.cell_count;
  if (static_cast<int>(rho.size()) != n)
    throw std::invalid_argument("solve_poisson: rho size does not match grid");
  for (double r : rho)
    if (!std::isfinite(r)) throw std::invalid_argument("solve_poisson: non-finite rho");

  const double h2 = grid.dx * grid.dx;
  // -V'' = rho, cell-centered, mirror ghosts V_0 = -V_1 and V_{n+1} = -V_n:
  // boundary rows get diagonal 3/h^2. Thomas algorithm.
  std::vector<double> diag(n, 2.0 / h2), rhs(rho);
  diag.front() = 3.0 / h2;
  diag.back() = 3.0 / h2;
  const double off = -1.0 / h2;

  std::vector<double> cp(n, 0.0);
  FieldState fs;
  fs.potential.assign(n, 0.0);
  // forward sweep
  cp[0] = off / diag[0];
  rhs[0] = rhs[0] / diag[0];
  for (int i = 1; i < n; ++i) {
    const double m = 1.0 / (diag[i] - off * cp[i - 1]);
    cp[i] = off * m;
    rhs[i] = (rhs[i] - off * rhs[i - 1]) * m;
  }
  fs.potential[n - 1] = rhs[n - 1];
  for (int i = n - 2; i >= 0; --i)
    fs.potential[i] = rhs[i] - cp[i] * fs.potential[i + 1];

  // residual of the linear solve, relative to the source scale
  double rho_scale = 1.0;
  for (double r : rho) rho_scale = std::max(rho_scale, std::abs(r));
  double res = 0.0;
  for (int i = 0; i < n; ++i) {
    const double vm = i > 0 ? fs.potential[i - 1] : -fs.potential[0];
    const double vp = i + 1 < n ? fs.potential[i + 1] : -fs.potential[n - 1];
    const double av = (-vm + 2.0 * fs.potential[i] - vp) / h2;
    res = std::max(res, std::abs(av - rho[i]));
  }
  fs.residual = res / rho_scale;
  if (fs.residual > 1e-10) {
    std::ostringstream msg;
    msg << "solve_poisson: linear solve residual " << fs.residual << " exceeds 1e-10";
    throw std::runtime_error(msg.str());
  }

  fs.grad_faces.assign(n + 1, 0.0);
  fs.grad_faces[0] = 2.0 * fs.potential[0] / grid.dx;  // (V_1 - V_ghost)/dx
  for (int i = 1; i < n; ++i)
    fs.grad_faces[i] = (fs.potential[i] - fs.potential[i - 1]) / grid.dx;
  fs.grad_faces[n] = -2.0 * fs.potential[n - 1] / grid.dx;

  fs.energy = 0.0;
  for (double g : fs.grad_faces) fs.energy += 0.5 * g * g * grid.dx;

  fs.rho = rho;
  return fs;
}

double field_energy_identity_residual(const FieldState& before,
                                      const FieldState& after,
                                      const SpatialGrid& grid,
                                      double dt, double theta) {
  if (!(dt > 0.0)) throw std::invalid_argument("field energy residual: dt must be > 0");
  if (!(theta > 0.0)) throw std::invalid_argument("field energy residual: Theta must be > 0");
  if (before.current.size() != static_cast<std::size_t>(grid.cell_count))
    throw std::invalid_argument("field energy residual: state lacks the current density");

  const double rate = (after.energy - before.energy) / (theta * dt);
  double work = 0.0;
  for (int i = 0; i < grid.cell_count; ++i)
    work += before.grad_center(i) * before.current[i] * grid.dx / theta;
  return std::abs(rate - work);
}

}  // namespace kinslab
