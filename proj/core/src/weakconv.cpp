#include "kinslab/weakconv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace kinslab {

namespace {

constexpr double kClipMax = 1e300;

void check_resolution(int resolution) {
  if (resolution < 1) throw std::invalid_argument("weakconv: resolution must be >= 1");
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lo = *std::max_element(v.begin(), v.begin() + mid);
    m = 0.5 * (m + lo);
  }
  return m;
}

}  // namespace

std::vector<double> truncate(const std::vector<double>& phi, double level) {
  if (!(level >= 0.0)) throw std::invalid_argument("truncate: level must be >= 0");
  std::vector<double> out(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) out[i] = std::min(phi[i], level);
  return out;
}

double weak_pairing(const std::vector<double>& phi, const std::vector<double>& g) {
  if (phi.size() != g.size())
    throw std::invalid_argument("weak_pairing: functions live on different grids");
  double s = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) s += phi[i] * g[i];
  return s / static_cast<double>(phi.size());
}

std::pair<int, int> decode_concentration_index(long n) {
  if (n < 1) throw std::invalid_argument("concentration_sequence: index must be >= 1");
  // smallest p with n <= p(p+1)/2
  long p = static_cast<long>(std::floor((std::sqrt(8.0 * n + 1.0) - 1.0) / 2.0));
  while (p * (p + 1) / 2 < n) ++p;
  while (p > 1 && (p - 1) * p / 2 >= n) --p;
  const long k = n - p * (p - 1) / 2 - 1;
  return {static_cast<int>(p), static_cast<int>(k)};
}

std::vector<double> concentration_sequence(long n, int resolution) {
  check_resolution(resolution);
  auto [p, k] = decode_concentration_index(n);
  const double lo = static_cast<double>(k) / p;
  const double hi = static_cast<double>(k + 1) / p;
  std::vector<double> out(resolution, 0.0);
  const double h = 1.0 / resolution;
  for (int i = 0; i < resolution; ++i) {
    const double a = i * h;
    const double b = a + h;
    const double overlap = std::min(b, hi) - std::max(a, lo);
    if (overlap > 0.0) out[i] = p * (overlap / h);  // exact cell average
  }
  return out;
}

std::vector<double> oscillation_blowup_sequence(long n, int resolution, int* clipped) {
  check_resolution(resolution);
  if (n < 1) throw std::invalid_argument("oscillation_blowup_sequence: index must be >= 1");
  std::vector<double> out(resolution);
  int clips = 0;
  for (int i = 0; i < resolution; ++i) {
    const double y = (i + 0.5) / resolution;
    double frac = n * y - std::floor(n * y);
    double value = frac > 0.0 ? 1.0 / frac : kClipMax;
    if (value > kClipMax) {
      value = kClipMax;
      ++clips;
    }
    out[i] = value;
  }
  if (clipped) *clipped = clips;
  return out;
}

GridFunctionSequence make_concentration_family(int terms, int resolution) {
  GridFunctionSequence seq;
  seq.resolution = resolution;
  seq.generator = "concentration";
  seq.terms.reserve(terms);
  for (long n = 1; n <= terms; ++n)
    seq.terms.push_back(concentration_sequence(n, resolution));
  return seq;
}

GridFunctionSequence make_oscillation_family(int terms, int resolution) {
  GridFunctionSequence seq;
  seq.resolution = resolution;
  seq.generator = "oscillation";
  seq.terms.reserve(terms);
  for (long n = 1; n <= terms; ++n)
    seq.terms.push_back(oscillation_blowup_sequence(n, resolution));
  return seq;
}

GridFunctionSequence make_constant_family(int terms, int resolution) {
  GridFunctionSequence seq;
  seq.resolution = resolution;
  seq.generator = "constant";
  std::vector<double> phi(resolution);
  for (int i = 0; i < resolution; ++i) phi[i] = 1.0 + (i + 0.5) / resolution;
  seq.terms.assign(terms, phi);
  return seq;
}

double apply_renormalizer(RenormalizerKind kind, double s, double level) {
  if (kind == RenormalizerKind::truncation) return std::min(s, level);
  return level * s / (level + s);
}

RenormEstimate estimate_renormalized_limit(const GridFunctionSequence& seq,
                                           const std::vector<double>& levels,
                                           int basis_size, RenormalizerKind kind,
                                           const EstimatorConfig& config) {
  if (seq.terms.size() < 32)
    throw std::invalid_argument("estimate_renormalized_limit: need at least 32 terms");
  if (basis_size < 1 || seq.resolution % basis_size != 0)
    throw std::invalid_argument(
        "estimate_renormalized_limit: basis size must divide the grid resolution");
  std::vector<double> sorted_levels = levels;
  std::sort(sorted_levels.begin(), sorted_levels.end());

  const int cells_per_basis = seq.resolution / basis_size;
  const std::size_t total = seq.terms.size();
  const std::size_t tail_start =
      total - static_cast<std::size_t>(std::ceil(config.tail_fraction * total));

  RenormEstimate result;
  for (double level : sorted_levels) {
    WeakLimitEstimate est;
    est.level = level;
    est.basis_size = basis_size;
    est.limit.assign(basis_size, 0.0);
    est.dispersion.assign(basis_size, 0.0);

    for (int b = 0; b < basis_size; ++b) {
      std::vector<double> pairings;
      pairings.reserve(total - tail_start);
      for (std::size_t n = tail_start; n < total; ++n) {
        const std::vector<double>& phi = seq.terms[n];
        double s = 0.0;
        for (int c = 0; c < cells_per_basis; ++c)
          s += apply_renormalizer(kind, phi[b * cells_per_basis + c], level);
        pairings.push_back(s / cells_per_basis);  // cell average on the basis cell
      }
      const double med = median_of(pairings);
      std::vector<double> dev(pairings.size());
      for (std::size_t t = 0; t < pairings.size(); ++t)
        dev[t] = std::abs(pairings[t] - med);
      est.limit[b] = med;
      est.dispersion[b] = median_of(dev);
      if (est.dispersion[b] > config.dispersion_cutoff)
        est.flagged.push_back(b);
    }
    result.levels.push_back(std::move(est));
  }

  for (std::size_t l = 1; l < result.levels.size(); ++l)
    for (int b = 0; b < basis_size; ++b)
      if (result.levels[l].limit[b] <
          result.levels[l - 1].limit[b] - config.dispersion_cutoff)
        ++result.monotonicity_violations;

  if (result.levels.size() >= 2) {
    const auto& top = result.levels.back();
    const auto& prev = result.levels[result.levels.size() - 2];
    for (int b = 0; b < basis_size; ++b)
      result.top_increment = std::max(result.top_increment,
                                      top.limit[b] - prev.limit[b]);
    result.unbounded_hint = result.top_increment > config.saturation_tol;
  }
  return result;
}

BitingResult biting_set_search(const GridFunctionSequence& seq, double eps,
                               double ui_constant, int cell_count,
                               const EstimatorConfig& config) {
  if (!(eps > 0.0 && eps < 0.5))
    throw std::invalid_argument("biting_set_search: eps must lie in (0, 1/2)");
  if (cell_count < 1 || seq.resolution % cell_count != 0)
    throw std::invalid_argument("biting_set_search: cell count must divide the resolution");
  if (seq.terms.empty()) throw std::invalid_argument("biting_set_search: empty sequence");

  const int fine_per_cell = seq.resolution / cell_count;
  const double h = 1.0 / seq.resolution;
  const std::size_t total = seq.terms.size();
  const std::size_t tail_start =
      total - static_cast<std::size_t>(std::ceil(config.tail_fraction * total));

  double observed_max = 0.0;
  for (std::size_t n = tail_start; n < total; ++n)
    for (double v : seq.terms[n]) observed_max = std::max(observed_max, v);
  std::vector<double> levels;
  for (double m = 1.0; m <= observed_max || levels.empty(); m *= 2.0) {
    levels.push_back(m);
    if (m > observed_max) break;
  }

  BitingResult result;
  result.cell_count = cell_count;
  for (double m : levels) {
    double delta = 0.0;
    for (std::size_t n = tail_start; n < total; ++n) {
      double meas = 0.0;
      for (double v : seq.terms[n])
        if (v >= m) meas += h;
      delta = std::max(delta, meas);
    }
    result.delta_table.emplace_back(m, delta);
  }

  // tail mass of term n at level m restricted to one dyadic cell
  auto cell_tail_mass = [&](std::size_t n, double m, int cell) {
    const std::vector<double>& phi = seq.terms[n];
    double s = 0.0;
    for (int c = 0; c < fine_per_cell; ++c) {
      const double v = phi[cell * fine_per_cell + c];
      if (v >= m) s += v * h;
    }
    return s;
  };

  std::vector<char> kept(cell_count, 1);
  double kept_measure = 1.0;
  const double cell_measure = 1.0 / cell_count;

  auto worst_violation = [&]() {
    // returns (stat, level, worst cell) of the largest threshold violation
    double worst_stat = 0.0, worst_level = levels.front();
    int worst_cell = -1;
    double worst_excess = 0.0;
    for (double m : levels) {
      double stat = 0.0;
      std::size_t arg_n = tail_start;
      for (std::size_t n = tail_start; n < total; ++n) {
        double s = 0.0;
        for (int cell = 0; cell < cell_count; ++cell)
          if (kept[cell]) s += cell_tail_mass(n, m, cell);
        if (s > stat) {
          stat = s;
          arg_n = n;
        }
      }
      const double threshold = ui_constant / m;
      if (stat - threshold > worst_excess) {
        worst_excess = stat - threshold;
        worst_stat = stat;
        worst_level = m;
        // cell contributing most to the worst term
        double best = -1.0;
        for (int cell = 0; cell < cell_count; ++cell) {
          if (!kept[cell]) continue;
          const double c = cell_tail_mass(arg_n, m, cell);
          if (c > best) {
            best = c;
            worst_cell = cell;
          }
        }
      }
    }
    return std::tuple<double, double, int>(worst_stat, worst_level, worst_cell);
  };

  while (true) {
    auto [stat, level, cell] = worst_violation();
    result.worst_stat = stat;
    result.worst_level = level;
    if (cell < 0) {  // witness satisfied at every level
      result.found = true;
      break;
    }
    if (kept_measure - cell_measure < 1.0 - eps) {
      result.found = false;
      break;
    }
    kept[cell] = 0;
    kept_measure -= cell_measure;
  }

  result.kept_measure = kept_measure;
  for (int cell = 0; cell < cell_count; ++cell)
    if (kept[cell]) result.kept_cells.push_back(cell);
  result.verdict = result.found
                       ? "biting set found"
                       : "no biting set at this eps";
  return result;
}

}  // namespace kinslab
