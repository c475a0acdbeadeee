#include "kinslab/phase_grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace kinslab {

SpatialGrid build_spatial_grid(double length, int cell_count) {
  if (!(length > 0.0)) throw std::invalid_argument("spatial grid: length must be > 0");
  if (cell_count < 2) throw std::invalid_argument("spatial grid: cell_count must be >= 2");
  SpatialGrid g;
  g.length = length;
  g.cell_count = cell_count;
  g.dx = length / cell_count;
  g.centers.resize(cell_count);
  for (int i = 0; i < cell_count; ++i) g.centers[i] = (i + 0.5) * g.dx;
  return g;
}

VelocityGrid build_velocity_grid(double v_max, int node_count) {
  if (!(v_max > 0.0)) throw std::invalid_argument("velocity grid: v_max must be > 0");
  if (node_count < 4) throw std::invalid_argument("velocity grid: Nv must be >= 4");
  if (node_count % 2 != 0)
    throw std::invalid_argument("velocity grid: Nv must be even (node symmetry)");

  VelocityGrid g;
  g.v_max = v_max;
  g.node_count = node_count;
  g.dv = 2.0 * v_max / node_count;
  g.nodes.resize(node_count);
  g.weights.assign(node_count, g.dv);
  const int half = node_count / 2;
  for (int k = 0; k < half; ++k) {
    const double v = (k + 0.5) * g.dv;  // positive half, ascending
    g.nodes[half + k] = v;
    g.nodes[half - 1 - k] = -v;  // exact mirror image
  }
  return g;
}

std::pair<std::vector<int>, std::vector<int>>
half_space_split(const VelocityGrid& grid, Wall wall) {
  const double n = wall_normal(wall);
  std::vector<int> outgoing, incoming;
  outgoing.reserve(grid.node_count / 2);
  incoming.reserve(grid.node_count / 2);
  for (int j = 0; j < grid.node_count; ++j) {
    (n * grid.nodes[j] > 0.0 ? outgoing : incoming).push_back(j);
  }
  return {std::move(outgoing), std::move(incoming)};
}

double wall_maxwellian_value(double v, double theta, int dimension) {
  const double pre = std::pow(2.0 * std::numbers::pi, 0.5 * (1 - dimension)) *
                     std::pow(theta, -0.5 * (dimension + 1));
  return pre * std::exp(-v * v / (2.0 * theta));
}

WallQuadrature wall_maxwellian(const VelocityGrid& grid, Wall wall,
                               double theta, int dimension) {
  if (!(theta > 0.0)) throw std::invalid_argument("wall Maxwellian: Theta must be > 0");
  if (dimension < 1) throw std::invalid_argument("wall Maxwellian: dimension must be >= 1");

  WallQuadrature wq;
  wq.wall = wall;
  wq.theta = theta;
  wq.dimension = dimension;
  std::tie(wq.outgoing, wq.incoming) = half_space_split(grid, wall);
  if (wq.outgoing.empty())
    throw std::invalid_argument("wall Maxwellian: outgoing half-set is empty");

  const int n = grid.node_count;
  wq.m_raw.resize(n);
  for (int j = 0; j < n; ++j)
    wq.m_raw[j] = wall_maxwellian_value(grid.nodes[j], theta, dimension);

  double z = 0.0;
  for (int j : wq.outgoing)
    z += wq.m_raw[j] * std::abs(grid.nodes[j]) * grid.weights[j];
  wq.z = z;

  wq.m.resize(n);
  wq.mu.resize(n);
  for (int j = 0; j < n; ++j) {
    wq.m[j] = wq.m_raw[j] / z;
    wq.mu[j] = wq.m[j] * std::abs(grid.nodes[j]) * grid.weights[j];
  }
  return wq;
}

}  // namespace kinslab
