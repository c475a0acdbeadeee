#pragma once

#include <optional>
#include <vector>

#include "kinslab/boundary.hpp"
#include "kinslab/field.hpp"
#include "kinslab/phase_grid.hpp"

namespace kinslab {

// Solver state: non-negative phase-space density on SpatialGrid x VelocityGrid,
// stored row-major by spatial cell.
struct DistributionFunction {
  int nx = 0;
  int nv = 0;
  double time = 0.0;
  std::vector<double> values;  // values[i * nv + j]

  DistributionFunction() = default;
  DistributionFunction(int nx_, int nv_)
      : nx(nx_), nv(nv_), values(static_cast<std::size_t>(nx_) * nv_, 0.0) {}

  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * nv + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * nv + j]; }

  double min_value() const;
};

struct Walls {
  WallSpec left;
  WallSpec right;
};

struct InitialCondition {
  enum class Preset { maxwellian, two_bump, uniform_box };
  Preset preset = Preset::maxwellian;
  // maxwellian / two_bump parameters
  double rho0 = 1.0;
  double u0 = 0.0;       // bulk (maxwellian) or bump separation (two_bump)
  double temperature = 1.0;
  double xmod_amp = 0.0;  // amplitude of 1 + a cos(2 pi x / Lx), a in [0,1)
  // uniform_box parameters
  double box_x0 = 0.25;
  double box_x1 = 0.75;
  double box_w = 1.0;
  double box_value = 1.0;

  bool operator==(const InitialCondition&) const = default;
};

DistributionFunction initial_condition(const InitialCondition& ic,
                                       const SpatialGrid& sx,
                                       const VelocityGrid& sv);

// Physics switches for one run. Everything defaults to off: plain free
// transport with Maxwell walls.
struct ModelConfig {
  double nu = 0.0;        // Fokker-Planck diffusion, >= 0
  double lambda = 0.0;    // friction drift coefficient
  bool poisson = false;   // self-consistent field
  bool bgk = false;       // BGK relaxation
  double tau = 1.0;       // BGK relaxation time, > 0 when enabled
  double theta_ref = 1.0; // bath temperature of the diagnostics reference Maxwellian

  bool fokker_planck_active() const {
    return nu > 0.0 || lambda != 0.0 || poisson;
  }

  bool operator==(const ModelConfig&) const = default;
};

struct StepReport {
  double dt = 0.0;
  double cfl_advection = 0.0;
  double cfl_drift = 0.0;
  double cfl_diffusion = 0.0;
  double min_f = 0.0;
  TraceRecord left;
  TraceRecord right;
  double interior_l2_face_sum = 0.0;
  double bgk_entropy_production = 0.0;
  std::optional<FieldState> field;
};

// Largest stable time step of the transport sub-step (CFL = 1).
double max_dt_transport(const SpatialGrid& sx, const VelocityGrid& sv);

// Largest time step for which the velocity-space sub-step provably keeps f
// non-negative, together with the two classic per-term bounds. efield may be
// null (no electrostatic drift).
double max_dt_fokker_planck(const SpatialGrid& sx, const VelocityGrid& sv,
                            double nu, double lambda,
                            const std::vector<double>* efield);

// First-order upwind free-transport step closed by Maxwell reflection at
// both walls. The boundary trace is read from the boundary cells of the
// pre-step state; the reflected density provides the ghost values on
// incoming velocities. Exactly conservative: the net mass flux through each
// wall face is zero up to roundoff.
struct TransportResult {
  TraceRecord left;
  TraceRecord right;
  // sum over interior faces of v^2 f_upwind w (pre-step values); together
  // with the wall lambda_2 fluxes this closes an exact discrete moment
  // identity for the upwind step (multiply the update by n(x) v and sum).
  double interior_l2_face_sum = 0.0;
};
TransportResult transport_step(DistributionFunction& f, const SpatialGrid& sx,
                               const VelocityGrid& sv, const Walls& walls,
                               double dt);

// Conservative finite-volume step in v for the drift-diffusion part
//   df/dt = d/dv[ (E + lambda v) f + nu df/dv ],
// with zero flux at v = +-v_max. Faces use the exponential-fitted
// (Scharfetter-Gummel) flux, which reduces to central differencing for
// well-resolved faces and to upwinding for convection-dominated ones, and
// whose discrete stationary state is the exact nodewise Gaussian when
// E = 0: the grid equilibrium of the operator is reproduced to roundoff.
// Velocity-space mass is conserved per spatial cell by telescoping.
void fokker_planck_step(DistributionFunction& f, const SpatialGrid& sx,
                        const VelocityGrid& sv, double dt, double nu,
                        double lambda, const std::vector<double>* efield);

// BGK relaxation f' = f + (dt/tau)(G - f), where G is the discrete-moment
// Maxwellian exp(eta0 + eta1 v + eta2 v^2) whose grid moments (1, v, v^2)
// match those of f exactly (Newton solve per cell). Mass, momentum and
// energy are conserved per cell to the Newton tolerance, and the returned
// entropy production sum_cells sum_j (G-f)(log G - log f) w dx / tau is
// non-negative by construction.
struct BgkResult {
  double entropy_production = 0.0;
  int max_newton_iterations = 0;
};
BgkResult bgk_step(DistributionFunction& f, const SpatialGrid& sx,
                   const VelocityGrid& sv, double dt, double tau);

// The moment-matched Maxwellian of one cell (the BGK relaxant), exposed for
// the gain/loss diagnostics. Empty result for a vacuum cell.
std::vector<double> bgk_local_maxwellian(const DistributionFunction& f,
                                         const VelocityGrid& sv, int cell);

// One full operator-split step: transport -> field update (if enabled) ->
// Fokker-Planck drift-diffusion -> BGK. Boundary traces come from the pure
// streaming sub-step.
StepReport step(DistributionFunction& f, const SpatialGrid& sx,
                const VelocityGrid& sv, const ModelConfig& cfg,
                const Walls& walls, double dt);

}  // namespace kinslab
