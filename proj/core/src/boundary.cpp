#include "kinslab/boundary.hpp"

#include <stdexcept>
#include <string>

namespace kinslab {

AccommodationLaw AccommodationLaw::constant(double a) {
  if (!(a > 0.0 && a <= 1.0))
    throw std::invalid_argument("accommodation: alpha must lie in (0,1]");
  AccommodationLaw law;
  law.kind = Kind::constant;
  law.alpha = a;
  return law;
}

AccommodationLaw AccommodationLaw::flux_dependent(double alpha_bar, double c) {
  if (!(alpha_bar > 0.0 && alpha_bar <= 1.0))
    throw std::invalid_argument("accommodation: alpha_bar must lie in (0,1]");
  if (!(c >= 0.0)) throw std::invalid_argument("accommodation: c must be >= 0");
  AccommodationLaw law;
  law.kind = Kind::flux_dependent;
  law.alpha = alpha_bar;
  law.decay = c;
  return law;
}

double AccommodationLaw::operator()(double flux) const {
  if (kind == Kind::constant) return alpha;
  const double s = flux > 0.0 ? flux : 0.0;
  return alpha + (1.0 - alpha) * std::exp(-decay * s);
}

WallSpec make_wall_spec(const VelocityGrid& grid, Wall wall, double theta,
                        LocalReflectKind kind, AccommodationLaw law) {
  WallSpec spec;
  spec.wall = wall;
  spec.theta = theta;
  spec.local_kind = kind;
  spec.law = law;
  spec.wq = wall_maxwellian(grid, wall, theta, 1);
  return spec;
}

static void check_half_size(const std::vector<double>& phi,
                            const WallQuadrature& wq, const char* where) {
  if (phi.size() != wq.half_size())
    throw std::invalid_argument(std::string(where) + ": density size does not match half-space");
}

double outgoing_flux(const std::vector<double>& phi, const VelocityGrid& grid,
                     const WallQuadrature& wq) {
  check_half_size(phi, wq, "outgoing_flux");
  double flux = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    if (phi[k] < 0.0)
      throw std::invalid_argument("outgoing_flux: negative trace density");
    const int j = wq.outgoing[k];
    flux += phi[k] * std::abs(grid.nodes[j]) * grid.weights[j];
  }
  return flux;
}

std::vector<double> local_reflect(const std::vector<double>& phi,
                                  const VelocityGrid& grid,
                                  const WallQuadrature& wq) {
  check_half_size(phi, wq, "local_reflect");
  std::vector<double> out(wq.incoming.size(), 0.0);
  // v -> -v maps the k-th outgoing node to the mirror node, which sits in
  // the incoming list at the mirrored position.
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const int j = wq.outgoing[k];
    const int jm = grid.mirror(j);
    // incoming list is ascending; the mirror of outgoing[k] is
    // incoming[half-1-k] for either wall orientation.
    const std::size_t km = wq.incoming.size() - 1 - k;
    if (wq.incoming[km] != jm)
      throw std::logic_error("local_reflect: grid symmetry violated");
    out[km] = phi[k];
  }
  return out;
}

std::vector<double> diffuse_reflect(const std::vector<double>& phi,
                                    const VelocityGrid& grid,
                                    const WallQuadrature& wq) {
  const double flux = outgoing_flux(phi, grid, wq);
  std::vector<double> out(wq.incoming.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = wq.m[wq.incoming[k]] * flux;
  return out;
}

std::pair<std::vector<double>, double>
maxwell_reflect(const std::vector<double>& phi, const VelocityGrid& grid,
                const WallSpec& spec) {
  const WallQuadrature& wq = spec.wq;
  const double flux = outgoing_flux(phi, grid, wq);
  const double a = spec.law(flux);
  if (!(a > 0.0 && a <= 1.0))
    throw std::runtime_error("maxwell_reflect: realized alpha outside (0,1]");

  std::vector<double> incoming = local_reflect(phi, grid, wq);
  for (std::size_t k = 0; k < incoming.size(); ++k) {
    const double diffuse = wq.m[wq.incoming[k]] * flux;
    incoming[k] = (1.0 - a) * incoming[k] + a * diffuse;
  }
  return {std::move(incoming), a};
}

double dg_information(const std::vector<double>& ratio, const WallQuadrature& wq) {
  if (ratio.size() != wq.half_size())
    throw std::invalid_argument("dg_information: ratio size does not match half-space");
  double mean = 0.0;
  double entropy = 0.0;
  for (std::size_t k = 0; k < ratio.size(); ++k) {
    const double mu = wq.mu[wq.outgoing[k]];
    mean += ratio[k] * mu;
    entropy += xlogx(ratio[k]) * mu;
  }
  return entropy - xlogx(mean);
}

double entropy_flux_gap(const std::vector<double>& outgoing,
                        const VelocityGrid& grid, const WallSpec& spec) {
  const WallQuadrature& wq = spec.wq;
  auto [incoming, alpha] = maxwell_reflect(outgoing, grid, spec);

  double flux_out = 0.0;
  std::vector<double> ratio(outgoing.size());
  for (std::size_t k = 0; k < outgoing.size(); ++k) {
    const int j = wq.outgoing[k];
    ratio[k] = outgoing[k] / wq.m[j];
    flux_out += xlogx(ratio[k]) * wq.mu[j];
  }
  double flux_in = 0.0;
  for (std::size_t k = 0; k < incoming.size(); ++k) {
    const int j = wq.incoming[k];
    flux_in += xlogx(incoming[k] / wq.m[j]) * wq.mu[j];
  }
  return flux_out - flux_in - alpha * dg_information(ratio, wq);
}

}  // namespace kinslab
