#include "kinslab/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "kinslab/parallel.hpp"

namespace kinslab {

double DistributionFunction::min_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values) m = std::min(m, v);
  return m;
}

namespace {

double gaussian(double v, double u, double temperature) {
  return std::exp(-(v - u) * (v - u) / (2.0 * temperature)) /
         std::sqrt(2.0 * std::numbers::pi * temperature);
}

// Bernoulli function w / (e^w - 1) of the exponential-fitted flux.
double bernoulli(double w) {
  if (std::abs(w) < 1e-5) return 1.0 - 0.5 * w + w * w / 12.0;
  return w / std::expm1(w);
}

}  // namespace

DistributionFunction initial_condition(const InitialCondition& ic,
                                       const SpatialGrid& sx,
                                       const VelocityGrid& sv) {
  using Preset = InitialCondition::Preset;
  if (ic.preset != Preset::uniform_box) {
    if (!(ic.rho0 > 0.0)) throw std::invalid_argument("initial condition: rho0 must be > 0");
    if (!(ic.temperature > 0.0))
      throw std::invalid_argument("initial condition: T0 must be > 0");
    if (!(ic.xmod_amp >= 0.0 && ic.xmod_amp < 1.0))
      throw std::invalid_argument("initial condition: xmod_amp must lie in [0,1)");
  } else {
    if (!(ic.box_value >= 0.0))
      throw std::invalid_argument("initial condition: box_value must be >= 0");
    if (!(ic.box_x1 > ic.box_x0))
      throw std::invalid_argument("initial condition: box_x1 must exceed box_x0");
    if (!(ic.box_w > 0.0)) throw std::invalid_argument("initial condition: box_w must be > 0");
  }

  DistributionFunction f(sx.cell_count, sv.node_count);
  for (int i = 0; i < sx.cell_count; ++i) {
    const double x = sx.centers[i];
    const double xmod =
        1.0 + ic.xmod_amp * std::cos(2.0 * std::numbers::pi * x / sx.length);
    for (int j = 0; j < sv.node_count; ++j) {
      const double v = sv.nodes[j];
      double value = 0.0;
      switch (ic.preset) {
        case Preset::maxwellian:
          value = ic.rho0 * gaussian(v, ic.u0, ic.temperature) * xmod;
          break;
        case Preset::two_bump:
          value = 0.5 * ic.rho0 *
                  (gaussian(v, ic.u0, ic.temperature) +
                   gaussian(v, -ic.u0, ic.temperature)) *
                  xmod;
          break;
        case Preset::uniform_box:
          value = (x >= ic.box_x0 && x <= ic.box_x1 && std::abs(v) <= ic.box_w)
                      ? ic.box_value
                      : 0.0;
          break;
      }
      if (!(value >= 0.0) || !std::isfinite(value))
        throw std::invalid_argument("initial condition: produced a negative or non-finite value");
      f.at(i, j) = value;
    }
  }
  return f;
}

double max_dt_transport(const SpatialGrid& sx, const VelocityGrid& sv) {
  double vmax = 0.0;
  for (double v : sv.nodes) vmax = std::max(vmax, std::abs(v));
  return sx.dx / vmax;
}

namespace {

// Per-cell outflow rate of the velocity-space flux; positivity of the
// explicit update needs dt * rate <= 1.
double fp_outflow_rate(const VelocityGrid& sv, double nu, double lambda,
                       double efield) {
  const double dv = sv.dv;
  const int nvf = sv.node_count + 1;  // faces
  auto face_speed = [&](int l) {
    // interior face l sits between nodes l-1 and l
    const double vf = 0.5 * (sv.nodes[l - 1] + sv.nodes[l]);
    return -(efield + lambda * vf);
  };
  double rate = 0.0;
  for (int j = 0; j < sv.node_count; ++j) {
    double out = 0.0;
    if (j + 1 <= nvf - 2) {  // upper interior face
      const double c = face_speed(j + 1);
      out += nu > 0.0 ? (nu / dv) * bernoulli(-c * dv / nu) : std::max(c, 0.0);
    }
    if (j >= 1) {  // lower interior face
      const double c = face_speed(j);
      out += nu > 0.0 ? (nu / dv) * bernoulli(c * dv / nu) : std::max(-c, 0.0);
    }
    rate = std::max(rate, out / dv);
  }
  return rate;
}

}  // namespace

double max_dt_fokker_planck(const SpatialGrid& sx, const VelocityGrid& sv,
                            double nu, double lambda,
                            const std::vector<double>* efield) {
  const double dv = sv.dv;
  double emax = 0.0;
  if (efield)
    for (double e : *efield) emax = std::max(emax, std::abs(e));
  const double cmax = emax + std::abs(lambda) * sv.v_max;

  double dt = std::numeric_limits<double>::infinity();
  if (cmax > 0.0) dt = std::min(dt, dv / cmax);
  if (nu > 0.0) dt = std::min(dt, 0.5 * dv * dv / nu);

  // positivity of the exponential-fitted update, evaluated at the worst cell
  double rate = fp_outflow_rate(sv, nu, lambda, emax);
  rate = std::max(rate, fp_outflow_rate(sv, nu, lambda, -emax));
  if (rate > 0.0) dt = std::min(dt, 1.0 / rate);
  (void)sx;
  return dt;
}

TransportResult transport_step(DistributionFunction& f, const SpatialGrid& sx,
                               const VelocityGrid& sv, const Walls& walls,
                               double dt) {
  const int nx = f.nx;
  const int nv = f.nv;
  if (nx != sx.cell_count || nv != sv.node_count)
    throw std::invalid_argument("transport_step: state does not match grids");
  double vabs_max = 0.0;
  for (double v : sv.nodes) vabs_max = std::max(vabs_max, std::abs(v));
  if (dt * vabs_max / sx.dx > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "transport_step: CFL violated, dt must be <= " << sx.dx / vabs_max;
    throw std::invalid_argument(msg.str());
  }

  // Traces from the pre-step boundary cells, then the reflected ghosts.
  TransportResult result;
  auto read_trace = [&](const WallSpec& spec, int cell) {
    TraceRecord tr;
    tr.wall = spec.wall;
    tr.time = f.time;
    tr.outgoing.resize(spec.wq.outgoing.size());
    for (std::size_t k = 0; k < tr.outgoing.size(); ++k)
      tr.outgoing[k] = f.at(cell, spec.wq.outgoing[k]);
    tr.flux = outgoing_flux(tr.outgoing, sv, spec.wq);
    auto [incoming, alpha] = maxwell_reflect(tr.outgoing, sv, spec);
    tr.incoming = std::move(incoming);
    tr.alpha = alpha;
    return tr;
  };
  result.left = read_trace(walls.left, 0);
  result.right = read_trace(walls.right, nx - 1);

  // ghost value per velocity node (incoming side of each wall)
  std::vector<double> ghost_left(nv, 0.0), ghost_right(nv, 0.0);
  for (std::size_t k = 0; k < walls.left.wq.incoming.size(); ++k)
    ghost_left[walls.left.wq.incoming[k]] = result.left.incoming[k];
  for (std::size_t k = 0; k < walls.right.wq.incoming.size(); ++k)
    ghost_right[walls.right.wq.incoming[k]] = result.right.incoming[k];

  // interior lambda_2 face moment on the pre-step state
  double face_sum = 0.0;
  for (int i = 0; i + 1 < nx; ++i) {
    double s = 0.0;
    for (int j = 0; j < nv; ++j) {
      const double v = sv.nodes[j];
      const double up = v > 0.0 ? f.at(i, j) : f.at(i + 1, j);
      s += v * v * up * sv.weights[j];
    }
    face_sum += s;
  }
  result.interior_l2_face_sum = face_sum;

  parallel_for(0, static_cast<std::size_t>(nv), [&](std::size_t j) {
    const double v = sv.nodes[j];
    const double c = v * dt / sx.dx;
    if (v > 0.0) {
      // upwind from the left; sweep right-to-left so reads see old values
      for (int i = nx - 1; i >= 1; --i)
        f.at(i, j) -= c * (f.at(i, j) - f.at(i - 1, j));
      f.at(0, j) -= c * (f.at(0, j) - ghost_left[j]);
    } else {
      const double a = -c;
      for (int i = 0; i + 1 < nx; ++i)
        f.at(i, j) -= a * (f.at(i, j) - f.at(i + 1, j));
      f.at(nx - 1, j) -= a * (f.at(nx - 1, j) - ghost_right[j]);
    }
  });
  return result;
}

void fokker_planck_step(DistributionFunction& f, const SpatialGrid& sx,
                        const VelocityGrid& sv, double dt, double nu,
                        double lambda, const std::vector<double>* efield) {
  if (nu < 0.0) throw std::invalid_argument("fokker_planck_step: nu must be >= 0");
  const int nx = f.nx;
  const int nv = f.nv;
  const double dv = sv.dv;

  double emax = 0.0;
  if (efield)
    for (double e : *efield) emax = std::max(emax, std::abs(e));
  const double cmax = emax + std::abs(lambda) * sv.v_max;
  if (cmax * dt / dv > 1.0 + 1e-12 || (nu > 0.0 && nu * dt / (dv * dv) > 0.5 + 1e-12) ||
      dt > max_dt_fokker_planck(sx, sv, nu, lambda, efield) * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "fokker_planck_step: CFL violated, dt must be <= "
        << max_dt_fokker_planck(sx, sv, nu, lambda, efield);
    throw std::invalid_argument(msg.str());
  }
  if (nu == 0.0 && lambda == 0.0 && emax == 0.0) return;

  parallel_for(0, static_cast<std::size_t>(nx), [&](std::size_t i) {
    const double e = efield ? (*efield)[i] : 0.0;
    std::vector<double> flux(nv + 1, 0.0);  // zero flux at +-v_max
    for (int l = 1; l < nv; ++l) {
      const double vf = 0.5 * (sv.nodes[l - 1] + sv.nodes[l]);
      const double c = -(e + lambda * vf);
      const double fl = f.at(i, l - 1);
      const double fr = f.at(i, l);
      if (nu > 0.0) {
        const double w = c * dv / nu;
        flux[l] = (nu / dv) * (bernoulli(-w) * fl - bernoulli(w) * fr);
      } else {
        flux[l] = c > 0.0 ? c * fl : c * fr;
      }
    }
    for (int j = 0; j < nv; ++j)
      f.at(i, j) -= (dt / dv) * (flux[j + 1] - flux[j]);
  });
}

namespace {

struct CellMoments {
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
};

CellMoments cell_moments(const DistributionFunction& f, const VelocityGrid& sv, int i) {
  CellMoments m;
  for (int j = 0; j < sv.node_count; ++j) {
    const double fw = f.at(i, j) * sv.weights[j];
    m.m0 += fw;
    m.m1 += fw * sv.nodes[j];
    m.m2 += fw * sv.nodes[j] * sv.nodes[j];
  }
  return m;
}

// Newton solve for the discrete Maxwellian exp(eta0 + eta1 v + eta2 v^2)
// matching the target grid moments. Returns the Maxwellian values.
struct DiscreteMaxwellian {
  std::vector<double> values;
  int iterations = 0;
};

DiscreteMaxwellian match_moments(const VelocityGrid& sv, const CellMoments& target,
                                 int cell_index) {
  const double u = target.m1 / target.m0;
  const double temperature = target.m2 / target.m0 - u * u;
  if (!(temperature > 0.0)) {
    std::ostringstream msg;
    msg << "bgk_step: degenerate temperature " << temperature << " in cell "
        << cell_index;
    throw std::runtime_error(msg.str());
  }

  std::array<double, 3> eta = {
      std::log(target.m0 / std::sqrt(2.0 * std::numbers::pi * temperature)) -
          u * u / (2.0 * temperature),
      u / temperature, -1.0 / (2.0 * temperature)};

  const int nv = sv.node_count;
  std::vector<double> g(nv);
  const double tol0 = 1e-14 * target.m0;
  const double tol1 = tol0 * std::max(1.0, sv.v_max);
  const double tol2 = tol0 * std::max(1.0, sv.v_max * sv.v_max);

  auto evaluate = [&](const std::array<double, 3>& p, std::array<double, 5>& mom) {
    mom.fill(0.0);
    for (int j = 0; j < nv; ++j) {
      const double v = sv.nodes[j];
      const double ex = p[0] + p[1] * v + p[2] * v * v;
      const double val = ex < 700.0 ? std::exp(ex) : std::numeric_limits<double>::infinity();
      g[j] = val * sv.weights[j];
      double pw = g[j];
      for (int k = 0; k < 5; ++k) {
        mom[k] += pw;
        pw *= v;
      }
    }
  };

  std::array<double, 5> mom{};
  evaluate(eta, mom);
  double res = std::abs(mom[0] - target.m0) / tol0 +
               std::abs(mom[1] - target.m1) / tol1 +
               std::abs(mom[2] - target.m2) / tol2;

  int iter = 0;
  for (; iter < 100; ++iter) {
    if (std::isfinite(res) &&
        std::abs(mom[0] - target.m0) <= tol0 &&
        std::abs(mom[1] - target.m1) <= tol1 &&
        std::abs(mom[2] - target.m2) <= tol2)
      break;

    // Jacobian is the (symmetric, positive definite) moment matrix.
    const double a = mom[0], b = mom[1], c = mom[2], d = mom[3], e = mom[4];
    const double det = a * (c * e - d * d) - b * (b * e - c * d) + c * (b * d - c * c);
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
      std::ostringstream msg;
      msg << "bgk_step: singular moment system in cell " << cell_index;
      throw std::runtime_error(msg.str());
    }
    const std::array<double, 3> rhs = {target.m0 - mom[0], target.m1 - mom[1],
                                       target.m2 - mom[2]};
    // inverse of the 3x3 Hankel matrix times rhs (cofactors)
    const double i00 = (c * e - d * d) / det;
    const double i01 = (c * d - b * e) / det;
    const double i02 = (b * d - c * c) / det;
    const double i11 = (a * e - c * c) / det;
    const double i12 = (b * c - a * d) / det;
    const double i22 = (a * c - b * b) / det;
    std::array<double, 3> delta = {
        i00 * rhs[0] + i01 * rhs[1] + i02 * rhs[2],
        i01 * rhs[0] + i11 * rhs[1] + i12 * rhs[2],
        i02 * rhs[0] + i12 * rhs[1] + i22 * rhs[2]};

    double damp = 1.0;
    std::array<double, 3> trial;
    std::array<double, 5> trial_mom{};
    double trial_res = std::numeric_limits<double>::infinity();
    for (int half = 0; half < 40; ++half) {
      for (int k = 0; k < 3; ++k) trial[k] = eta[k] + damp * delta[k];
      evaluate(trial, trial_mom);
      trial_res = std::abs(trial_mom[0] - target.m0) / tol0 +
                  std::abs(trial_mom[1] - target.m1) / tol1 +
                  std::abs(trial_mom[2] - target.m2) / tol2;
      if (std::isfinite(trial_res) && trial_res < res) break;
      damp *= 0.5;
    }
    eta = trial;
    mom = trial_mom;
    res = trial_res;
  }
  if (iter >= 100) {
    std::ostringstream msg;
    msg << "bgk_step: moment matching did not converge in cell " << cell_index;
    throw std::runtime_error(msg.str());
  }

  DiscreteMaxwellian result;
  result.iterations = iter;
  result.values.resize(nv);
  for (int j = 0; j < nv; ++j) result.values[j] = g[j] / sv.weights[j];
  return result;
}

}  // namespace

std::vector<double> bgk_local_maxwellian(const DistributionFunction& f,
                                         const VelocityGrid& sv, int cell) {
  const CellMoments m = cell_moments(f, sv, cell);
  if (!(m.m0 > 0.0)) return {};
  return match_moments(sv, m, cell).values;
}

BgkResult bgk_step(DistributionFunction& f, const SpatialGrid& sx,
                   const VelocityGrid& sv, double dt, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("bgk_step: tau must be > 0");
  if (dt / tau > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "bgk_step: relaxation stability violated, dt must be <= " << tau;
    throw std::invalid_argument(msg.str());
  }

  const int nx = f.nx;
  const int nv = f.nv;
  std::vector<double> cell_entropy(nx, 0.0);
  std::vector<int> cell_iters(nx, 0);
  const double floor = 1e-300;  // keeps log finite on vacuum nodes

  parallel_for(0, static_cast<std::size_t>(nx), [&](std::size_t i) {
    const CellMoments m = cell_moments(f, sv, static_cast<int>(i));
    if (!(m.m0 > 0.0)) return;  // vacuum cell, Q = 0
    DiscreteMaxwellian gm = match_moments(sv, m, static_cast<int>(i));
    cell_iters[i] = gm.iterations;
    double e = 0.0;
    for (int j = 0; j < nv; ++j) {
      const double fj = std::max(f.at(i, j), floor);
      const double gj = std::max(gm.values[j], floor);
      // (G - f)(log G - log f) >= 0: both factors share their sign
      e += (gj - fj) * (std::log(gj) - std::log(fj)) * sv.weights[j];
      f.at(i, j) += (dt / tau) * (gm.values[j] - f.at(i, j));
    }
    cell_entropy[i] = e / tau;
  });

  BgkResult result;
  for (int i = 0; i < nx; ++i) {
    result.entropy_production += cell_entropy[i] * sx.dx;
    result.max_newton_iterations = std::max(result.max_newton_iterations, cell_iters[i]);
  }
  return result;
}

StepReport step(DistributionFunction& f, const SpatialGrid& sx,
                const VelocityGrid& sv, const ModelConfig& cfg,
                const Walls& walls, double dt) {
  StepReport report;
  report.dt = dt;

  TransportResult tr = transport_step(f, sx, sv, walls, dt);
  report.left = std::move(tr.left);
  report.right = std::move(tr.right);
  report.interior_l2_face_sum = tr.interior_l2_face_sum;

  std::vector<double> efield;
  if (cfg.poisson) {
    Moments mom = density_moments(f, sv);
    FieldState fs = solve_poisson(mom.rho, sx);
    fs.current = std::move(mom.current);
    efield.resize(sx.cell_count);
    for (int i = 0; i < sx.cell_count; ++i) efield[i] = fs.grad_center(i);
    report.field = std::move(fs);
  }

  if (cfg.fokker_planck_active()) {
    fokker_planck_step(f, sx, sv, dt, cfg.nu, cfg.lambda,
                       cfg.poisson ? &efield : nullptr);
  }

  if (cfg.bgk) {
    BgkResult bgk = bgk_step(f, sx, sv, dt, cfg.tau);
    report.bgk_entropy_production = bgk.entropy_production;
  }

  f.time += dt;

  double vabs_max = 0.0;
  for (double v : sv.nodes) vabs_max = std::max(vabs_max, std::abs(v));
  double emax = 0.0;
  for (double e : efield) emax = std::max(emax, std::abs(e));
  report.cfl_advection = vabs_max * dt / sx.dx;
  report.cfl_drift = cfg.fokker_planck_active()
                         ? (emax + std::abs(cfg.lambda) * sv.v_max) * dt / sv.dv
                         : 0.0;
  report.cfl_diffusion = cfg.nu * dt / (sv.dv * sv.dv);
  report.min_f = f.min_value();
  return report;
}

}  // namespace kinslab
