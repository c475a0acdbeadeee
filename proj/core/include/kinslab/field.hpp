#pragma once

#include <vector>

#include "kinslab/phase_grid.hpp"

namespace kinslab {

struct DistributionFunction;  // solver.hpp

// Velocity moments of f on the spatial grid.
struct Moments {
  std::vector<double> rho;     // number density, sum_j f w_j
  std::vector<double> current; // j = sum_j f v_j w_j
  std::vector<double> energy;  // kinetic energy density, 1/2 sum_j f v_j^2 w_j
};

Moments density_moments(const DistributionFunction& f, const VelocityGrid& grid);

// Electrostatic state from the Dirichlet Poisson problem -V'' = rho,
// V = 0 at both walls. Cell-centered V with mirror ghosts (V_ghost = -V_1),
// so the wall value is enforced at second order. The gradient dV/dx lives
// at the Nx+1 faces; energy is the face sum of (dV/dx)^2 / 2 * dx.
struct FieldState {
  std::vector<double> potential;   // V at cell centers
  std::vector<double> grad_faces;  // dV/dx at faces, size Nx+1
  std::vector<double> rho;         // source used for the solve
  std::vector<double> current;     // j at cell centers (from density_moments)
  double energy = 0.0;             // W = sum_faces (dV/dx)^2/2 dx
  double residual = 0.0;           // max |A V - rho| / max(|rho|, 1)

  // dV/dx averaged to cell center i.
  double grad_center(int i) const {
    return 0.5 * (grad_faces[i] + grad_faces[i + 1]);
  }
};

// Thomas-algorithm tridiagonal solve of the Dirichlet problem. The relative
// residual of the linear solve is checked and stored; values above 1e-10
// are reported as an error.
FieldState solve_poisson(const std::vector<double>& rho, const SpatialGrid& grid);

// Residual of the discrete field-energy identity between two consecutive
// field states: the rate of change of the face-based field energy against
// the work integral of the field on the current,
//   | (W1 - W0) / (Theta dt)  -  sum_i dV/dx(center_i) j_i dx / Theta |.
// The continuum identity d/dt int |V'|^2/(2 Theta) = int V' j / Theta follows
// from the continuity equation and the Poisson problem; discretely the
// residual is O(dt + dx) on smooth runs and vanishes at equilibrium.
double field_energy_identity_residual(const FieldState& before,
                                      const FieldState& after,
                                      const SpatialGrid& grid,
                                      double dt, double theta);

}  // namespace kinslab
