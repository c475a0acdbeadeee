#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "kinslab/phase_grid.hpp"

namespace kinslab {

// Entropy integrand s log s, continuously extended by h(0) = 0.
inline double xlogx(double s) { return s > 0.0 ? s * std::log(s) : 0.0; }

// Accommodation coefficient law. Either a constant alpha in (0, 1] or the
// flux-dependent family alpha(s) = alpha_bar + (1 - alpha_bar) exp(-c s),
// which is continuous with 0 < alpha_bar <= alpha(s) <= 1 for all s >= 0.
struct AccommodationLaw {
  enum class Kind { constant, flux_dependent };
  Kind kind = Kind::constant;
  double alpha = 1.0;      // constant value, or alpha_bar for flux_dependent
  double decay = 0.0;      // c >= 0, flux_dependent only

  static AccommodationLaw constant(double a);
  static AccommodationLaw flux_dependent(double alpha_bar, double c);

  // Evaluates alpha(flux). Always lands in [alpha_bar, 1].
  double operator()(double flux) const;
  // Guaranteed lower bound alpha_bar.
  double lower_bound() const { return alpha; }

  bool operator==(const AccommodationLaw&) const = default;
};

// In the 1D slab the inverse reflection v -> -v and the specular reflection
// v -> v - 2 (v.n) n coincide; both names are accepted in configuration and
// share one code path.
enum class LocalReflectKind { specular, inverse };

struct WallSpec {
  Wall wall = Wall::left;
  double theta = 1.0;
  LocalReflectKind local_kind = LocalReflectKind::specular;
  AccommodationLaw law;
  WallQuadrature wq;
};

WallSpec make_wall_spec(const VelocityGrid& grid, Wall wall, double theta,
                        LocalReflectKind kind, AccommodationLaw law);

// Boundary trace of one wall at one step. Densities are stored in the order
// of wq.outgoing / wq.incoming.
struct TraceRecord {
  Wall wall = Wall::left;
  double time = 0.0;
  std::vector<double> outgoing;  // gamma_+ f on outgoing nodes
  std::vector<double> incoming;  // gamma_- f on incoming nodes
  double flux = 0.0;             // phi~, mass flux onto the wall
  double alpha = 1.0;            // realized accommodation coefficient
};

// Out-coming mass flux phi~ = sum_out phi_j |v_j| w_j. phi is aligned with
// wq.outgoing. Negative entries signal positivity loss upstream and are
// rejected.
double outgoing_flux(const std::vector<double>& phi, const VelocityGrid& grid,
                     const WallQuadrature& wq);

// Local (specular/inverse) reflection: (L phi)(v) = phi(-v), an exact node
// permutation. Result is aligned with wq.incoming.
std::vector<double> local_reflect(const std::vector<double>& phi,
                                  const VelocityGrid& grid,
                                  const WallQuadrature& wq);

// Diffuse reflection: (D phi)(v) = M(v) phi~. Result aligned with wq.incoming.
std::vector<double> diffuse_reflect(const std::vector<double>& phi,
                                    const VelocityGrid& grid,
                                    const WallQuadrature& wq);

// Maxwell reflection R = (1 - alpha) L + alpha D with alpha evaluated from
// the wall's accommodation law at phi~. Returns the incoming density and the
// realized alpha. Incoming flux of the result equals phi~ up to roundoff.
std::pair<std::vector<double>, double>
maxwell_reflect(const std::vector<double>& phi, const VelocityGrid& grid,
                const WallSpec& spec);

// Darrozes-Guiraud information E(phi) = sum h(phi_j) mu_j - h(sum phi_j mu_j)
// over the outgoing half. The input is the ratio gamma_+ f / M evaluated
// nodewise (the caller divides by M_j once, outside hot loops). Non-negative
// by Jensen's inequality since mu is a discrete probability measure.
double dg_information(const std::vector<double>& ratio, const WallQuadrature& wq);

// Boundary entropy-flux gap
//   sum_out h(g+/M) mu - sum_in h(g-/M) mu - alpha E(g+/M),
// where g- = R g+. This is the discrete form of the convexity chain behind
// the Darrozes-Guiraud inequality; it is >= 0 up to roundoff for every
// non-negative trace and every accommodation law, and vanishes identically
// when alpha = 1.
double entropy_flux_gap(const std::vector<double>& outgoing,
                        const VelocityGrid& grid, const WallSpec& spec);

}  // namespace kinslab
