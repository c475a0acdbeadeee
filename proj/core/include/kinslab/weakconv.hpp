#pragma once

#include <string>
#include <utility>
#include <vector>

namespace kinslab {

// Finite sample of a non-negative function sequence on [0,1], piecewise
// constant on a uniform fine grid of `resolution` cells.
struct GridFunctionSequence {
  int resolution = 0;
  std::vector<std::vector<double>> terms;
  std::string generator;
};

// Truncation T_M(s) = min(s, M), nodewise. Idempotent and monotone in M.
std::vector<double> truncate(const std::vector<double>& phi, double level);

// Riemann pairing sum_i phi_i g_i / resolution (the sigma(L^inf, L^1) pairing
// on the fine grid).
double weak_pairing(const std::vector<double>& phi, const std::vector<double>& g);

// n-th term of the concentration family p 1_[k/p,(k+1)/p): n enumerates the
// pairs (p, k) with p >= 1, 0 <= k <= p-1 densely, n = p(p-1)/2 + k + 1.
// Cells are filled with the exact cell average of the spike, so the discrete
// L1 norm is 1 to roundoff for every p and every resolution.
std::pair<int, int> decode_concentration_index(long n);
std::vector<double> concentration_sequence(long n, int resolution);

// n-th term of the oscillation blow-up family u(n y), u the 1-periodic
// extension of 1/y, sampled at cell centers. Samples above 1e300 are clipped;
// the clip count is reported through `clipped` when non-null.
std::vector<double> oscillation_blowup_sequence(long n, int resolution,
                                                int* clipped = nullptr);

// Ready-made test families.
GridFunctionSequence make_concentration_family(int terms, int resolution);
GridFunctionSequence make_oscillation_family(int terms, int resolution);
// Constant-in-n sequence phi_n = phi with phi(y) = 1 + y.
GridFunctionSequence make_constant_family(int terms, int resolution);

// Renormalizing families for the limit estimator: the truncations T_M, or
// the smooth concave alternative alpha_M(s) = M s / (M + s) (both increase
// to the identity as M grows; the estimated limit must not depend on the
// choice).
enum class RenormalizerKind { truncation, rational };
double apply_renormalizer(RenormalizerKind kind, double s, double level);

struct EstimatorConfig {
  double tail_fraction = 0.5;      // tail window = last half of the sequence
  double dispersion_cutoff = 1e-3; // flag basis elements above this spread
  double saturation_tol = 5e-2;    // growth at the top level => unbounded hint
};

// One truncation level of the estimated weak-* limit. `limit` holds the
// piecewise-constant estimate per dyadic basis cell; `dispersion` the robust
// spread (median absolute deviation) of the tail pairings per cell.
struct WeakLimitEstimate {
  double level = 0.0;
  int basis_size = 0;
  std::vector<double> limit;
  std::vector<double> dispersion;
  std::vector<int> flagged;  // basis cells whose pairings did not settle
};

struct RenormEstimate {
  std::vector<WeakLimitEstimate> levels;  // ascending truncation level
  int monotonicity_violations = 0;        // (level, cell) pairs decreasing in M
  double top_increment = 0.0;             // max cell growth at the top level
  bool unbounded_hint = false;            // top level still growing
};

// Estimates the renormalized limit of the sequence: for each level M the
// tail statistic of <T_M(phi_n), 1_cell> over a dyadic indicator basis. The
// location statistic is the tail median (robust against the slowly decaying
// pre-asymptotic spikes of concentration-type families); monotonicity in M
// is checked and reported, never repaired.
RenormEstimate estimate_renormalized_limit(const GridFunctionSequence& seq,
                                           const std::vector<double>& levels,
                                           int basis_size,
                                           RenormalizerKind kind = RenormalizerKind::truncation,
                                           const EstimatorConfig& config = {});

struct BitingResult {
  bool found = false;
  std::string verdict;
  std::vector<int> kept_cells;  // indices into the dyadic cell partition
  int cell_count = 0;           // partition size
  double kept_measure = 0.0;
  double worst_stat = 0.0;      // final sup_n tail mass on the kept set
  double worst_level = 0.0;     // level at which worst_stat was measured
  // asymptotic L0 boundedness table: (M, sup_{n in tail} meas{phi_n >= M})
  std::vector<std::pair<double, double>> delta_table;
};

// Constructive biting-set search: greedily removes the dyadic cells with the
// worst tail uniform-integrability statistic until the witness
//   sup_{n in tail} int_A phi_n 1_{phi_n >= M} <= ui_constant / M
// holds at every dyadic level up to the observed maximum, or the removal
// budget (measure eps) is exhausted. eps must lie in (0, 1/2).
BitingResult biting_set_search(const GridFunctionSequence& seq, double eps,
                               double ui_constant = 4.0, int cell_count = 32,
                               const EstimatorConfig& config = {});

}  // namespace kinslab
