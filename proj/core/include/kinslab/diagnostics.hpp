#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "kinslab/field.hpp"
#include "kinslab/solver.hpp"

namespace kinslab {

// Per-wall ledger columns.
struct WallColumns {
  double phi = 0.0;           // outgoing mass flux phi~
  double alpha = 1.0;         // realized accommodation coefficient
  double dg = 0.0;            // Darrozes-Guiraud information E(gamma_+ / M)
  double flux_l1 = 0.0;       // sum gamma f (1 + v^2) |v| w, both halves
  double flux_l2 = 0.0;       // sum gamma f v^2 w, both halves
  double flux_l1_in = 0.0;    // incoming half of flux_l1
  double flux_l2_in = 0.0;    // incoming half of flux_l2
  double sqrt_phi = 0.0;      // sqrt(phi~)
  double entropy_flux = 0.0;  // sum_out h(g+/M) mu - sum_in h(g-/M) mu
  double bc_margin = 0.0;     // min_j (gamma_-(j) - alpha_bar M_j phi~)
  double sqrt1p_l2 = 0.0;     // sum_in sqrt(1 + gamma_-) v^2 w
};

struct LedgerRow {
  long step = 0;
  double time = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double momentum = 0.0;
  double kinetic_energy = 0.0;  // sum f v^2 dx dv (no 1/2)
  double entropy = 0.0;         // sum f |log f| dx dv, 0 log 0 = 0
  double rel_entropy = 0.0;     // H = sum h(f/M_ref) M_ref dx dv
  double field_energy = 0.0;
  double fisher = 0.0;          // sum |df/dv|^2 / f dx dv (one-sided quotient)
  double bgk_entropy = 0.0;     // entropy production of the BGK sub-step
  WallColumns left;
  WallColumns right;
  double nx_moment = 0.0;       // sum f n(x) v dx dv with n(x) = 2x/Lx - 1
  double face_l2 = 0.0;         // interior lambda_2 face moment (transport)
  // running time integrals
  double cum_alpha_dg = 0.0;
  double cum_fisher = 0.0;
  double cum_bgk_entropy = 0.0;
  double cum_flux_l2 = 0.0;
  double cum_sqrt_phi = 0.0;
  double cum_sqrt1p_l2 = 0.0;
  double cum_face_l2 = 0.0;
  double cum_kinetic = 0.0;
  double min_f = 0.0;
};

struct CheckItem {
  std::string name;
  bool pass = true;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct CheckReport {
  std::string name;
  bool pass = true;
  std::vector<CheckItem> items;

  void add(CheckItem item) {
    pass = pass && item.pass;
    items.push_back(std::move(item));
  }
};

// Records every functional of the free-transport and VPFP a-priori bounds
// once per step, with running time integrals of the dissipation terms.
// The relative entropy uses the discretely renormalized reference Maxwellian
// at theta_ref on the same grid, so the discrete entropy balance closes
// exactly against the wall entropy fluxes when the wall temperatures match.
class DiagnosticsLedger {
 public:
  DiagnosticsLedger(const SpatialGrid& sx, const VelocityGrid& sv,
                    const Walls& walls, const ModelConfig& cfg);

  // Appends one row. report == nullptr records the initial state (row 0).
  const LedgerRow& record(const DistributionFunction& f,
                          const StepReport* report);

  const std::vector<LedgerRow>& rows() const { return rows_; }
  const SpatialGrid& spatial() const { return sx_; }
  const VelocityGrid& velocity() const { return sv_; }
  const Walls& walls() const { return walls_; }
  const ModelConfig& config() const { return cfg_; }
  double theta_ref() const { return cfg_.theta_ref; }

  // Fixed column order, header + one row per step, 17 significant digits.
  void write_csv(std::ostream& os) const;
  static std::string csv_header();

 private:
  SpatialGrid sx_;
  VelocityGrid sv_;
  Walls walls_;
  ModelConfig cfg_;
  std::vector<double> m_ref_;  // renormalized reference Maxwellian, all nodes
  std::vector<LedgerRow> rows_;

  WallColumns wall_columns(const TraceRecord& trace, const WallSpec& spec) const;
};

// Discrete entropy balance and dissipation inequalities on a recorded run:
// monotonicity of H, the differential form dH/dt + alpha_hat (E_L + E_R) <= 0,
// the balance residual |dH/dt + boundary entropy flux| (pure numerical
// dissipation, reported against balance_tol), and the cumulative bound
// cum alpha E <= H(0) - H(end) + 1e-6.
CheckReport check_entropy_balance(const DiagnosticsLedger& ledger,
                                  double alpha_hat,
                                  double balance_tol = 1e-3);

// Trace moment identities and the lambda_2 flux bound:
//  - discrete constants C1 = 1 / sum_in M v^2 w and C2 = sum_in M (1+v^2)|v| w,
//  - identity phi~ = C1 sum_in gamma_- v^2 w      (pure diffuse walls),
//  - identity sum_in gamma_- (1+v^2)|v| w = C2 phi~ (pure diffuse walls),
//  - the exact discrete moment identity linking the cumulative wall lambda_2
//    flux to interior moments, and the implied run bound.
CheckReport check_trace_moment_bound(const DiagnosticsLedger& ledger);

// Lower trace bound gamma_- >= alpha_bar M phi~ nodewise (recorded margin)
// and the cumulative sqrt trace estimate: per wall,
// cum sqrt(phi~) <= cum [sum_in sqrt(1+gamma_-) v^2 w] / C_w with
// C_w = sqrt(alpha_bar) sum_in sqrt(M) v^2 w.
CheckReport check_sqrt_trace_bound(const DiagnosticsLedger& ledger);

// Weighted gain/loss bound of the BGK stand-in on one state: reports the
// smallest C_R with sum_{|v|<=R} Q^{+-}/(1+f) w <= C_R sum [(1+v^2) f + e(f)] w
// per cell, R = radius (<= v_max).
CheckReport check_weighted_collision_bound(const DistributionFunction& f,
                                           const SpatialGrid& sx,
                                           const VelocityGrid& sv,
                                           double tau, double radius);

// Run-level no-blow-up guard: every monitored functional stays finite and
// below 10 x max(its initial value, 1).
CheckReport check_boundedness(const DiagnosticsLedger& ledger);

// Relative mass drift against row 0.
CheckReport check_mass_conservation(const DiagnosticsLedger& ledger, double tol);

}  // namespace kinslab
