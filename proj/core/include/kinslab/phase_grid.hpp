#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace kinslab {

// Uniform cell-centered partition of the slab [0, Lx].
struct SpatialGrid {
  double length = 1.0;   // Lx
  int cell_count = 0;    // Nx >= 2
  double dx = 0.0;
  std::vector<double> centers;  // strictly increasing, centers[i] = (i+1/2)*dx
};

SpatialGrid build_spatial_grid(double length, int cell_count);

// Uniform midpoint velocity grid on [-v_max, v_max], symmetric about 0 with
// no node at 0. Node j and node Nv-1-j carry exactly opposite velocities
// (the negative half is constructed by negating the positive half, so the
// symmetry holds bit-exactly, not just to roundoff).
struct VelocityGrid {
  double v_max = 0.0;
  int node_count = 0;  // Nv, even, >= 4
  double dv = 0.0;
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;  // all equal to dv for the midpoint rule
  std::string rule = "midpoint-uniform";

  // Involution v_j -> -v_j.
  int mirror(int j) const { return node_count - 1 - j; }
};

VelocityGrid build_velocity_grid(double v_max, int node_count);

enum class Wall { left, right };

// Outward normal of the slab at a wall: -1 at x=0, +1 at x=Lx.
inline double wall_normal(Wall w) { return w == Wall::left ? -1.0 : 1.0; }
inline const char* wall_name(Wall w) { return w == Wall::left ? "left" : "right"; }

// Velocity half-space decomposition at a wall. Outgoing means n(x).v > 0
// (particles about to hit the wall), incoming means n(x).v < 0. Index lists
// are in ascending node order; together they partition all nodes.
std::pair<std::vector<int>, std::vector<int>>
half_space_split(const VelocityGrid& grid, Wall wall);

// Wall Maxwellian restricted to the grid, renormalized so that the discrete
// flux measure mu_j = M_j |v_j| w_j is a probability measure on each
// half-space exactly (up to roundoff), not merely in the continuum limit.
// The raw profile is (2 pi)^((1-N)/2) Theta^(-(N+1)/2) exp(-|v|^2 / (2 Theta));
// Z is the discrete outgoing flux of the raw profile and M_j = raw_j / Z.
struct WallQuadrature {
  Wall wall = Wall::left;
  double theta = 1.0;
  int dimension = 1;
  std::vector<int> outgoing;  // node indices with n.v > 0
  std::vector<int> incoming;  // node indices with n.v < 0
  std::vector<double> m_raw;  // raw Maxwellian at every node
  std::vector<double> m;      // renormalized Maxwellian at every node
  std::vector<double> mu;     // mu_j = m_j |v_j| w_j at every node
  double z = 1.0;             // renormalization constant

  std::size_t half_size() const { return outgoing.size(); }
};

// Raw Maxwellian value at one velocity (kept general in N for testing the
// prefactor; the solver always runs with N = 1).
double wall_maxwellian_value(double v, double theta, int dimension);

WallQuadrature wall_maxwellian(const VelocityGrid& grid, Wall wall,
                               double theta, int dimension = 1);

}  // namespace kinslab
