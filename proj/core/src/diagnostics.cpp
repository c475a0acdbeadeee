#include "kinslab/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace kinslab {

namespace {

void ensure_finite(double value, const char* column) {
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "diagnostics: column '" << column << "' is not finite";
    throw std::runtime_error(msg.str());
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool pure_diffuse(const WallSpec& spec) {
  return spec.law.kind == AccommodationLaw::Kind::constant && spec.law.alpha == 1.0;
}

}  // namespace

DiagnosticsLedger::DiagnosticsLedger(const SpatialGrid& sx, const VelocityGrid& sv,
                                     const Walls& walls, const ModelConfig& cfg)
    : sx_(sx), sv_(sv), walls_(walls), cfg_(cfg) {
  m_ref_ = wall_maxwellian(sv, Wall::left, cfg.theta_ref, 1).m;
}

WallColumns DiagnosticsLedger::wall_columns(const TraceRecord& trace,
                                            const WallSpec& spec) const {
  const WallQuadrature& wq = spec.wq;
  WallColumns c;
  c.phi = trace.flux;
  c.alpha = trace.alpha;
  c.sqrt_phi = std::sqrt(trace.flux);

  double dg_mean = 0.0, dg_entropy = 0.0;
  for (std::size_t k = 0; k < trace.outgoing.size(); ++k) {
    const int j = wq.outgoing[k];
    const double v = sv_.nodes[j];
    const double w = sv_.weights[j];
    const double g = trace.outgoing[k];
    c.flux_l1 += g * (1.0 + v * v) * std::abs(v) * w;
    c.flux_l2 += g * v * v * w;
    const double ratio = g / wq.m[j];
    dg_mean += ratio * wq.mu[j];
    dg_entropy += xlogx(ratio) * wq.mu[j];
  }
  c.dg = dg_entropy - xlogx(dg_mean);
  c.entropy_flux = dg_entropy;

  const double alpha_bar = spec.law.lower_bound();
  c.bc_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < trace.incoming.size(); ++k) {
    const int j = wq.incoming[k];
    const double v = sv_.nodes[j];
    const double w = sv_.weights[j];
    const double g = trace.incoming[k];
    c.flux_l1_in += g * (1.0 + v * v) * std::abs(v) * w;
    c.flux_l2_in += g * v * v * w;
    c.sqrt1p_l2 += std::sqrt(1.0 + g) * v * v * w;
    c.entropy_flux -= xlogx(g / wq.m[j]) * wq.mu[j];
    c.bc_margin = std::min(c.bc_margin, g - alpha_bar * wq.m[j] * trace.flux);
  }
  c.flux_l1 += c.flux_l1_in;
  c.flux_l2 += c.flux_l2_in;
  return c;
}

const LedgerRow& DiagnosticsLedger::record(const DistributionFunction& f,
                                           const StepReport* report) {
  LedgerRow row;
  row.step = static_cast<long>(rows_.size());
  row.time = f.time;
  row.dt = report ? report->dt : 0.0;

  const double dx = sx_.dx;
  double mass = 0.0, momentum = 0.0, kinetic = 0.0, entropy = 0.0;
  double rel_entropy = 0.0, fisher = 0.0, nx_moment = 0.0;
  double fmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < f.nx; ++i) {
    const double n = 2.0 * sx_.centers[i] / sx_.length - 1.0;
    double cm = 0.0, cp = 0.0, ck = 0.0, ce = 0.0, ch = 0.0, cf = 0.0;
    for (int j = 0; j < f.nv; ++j) {
      const double v = sv_.nodes[j];
      const double w = sv_.weights[j];
      const double fv = f.at(i, j);
      fmin = std::min(fmin, fv);
      cm += fv * w;
      cp += fv * v * w;
      ck += fv * v * v * w;
      ce += (fv > 0.0 ? fv * std::abs(std::log(fv)) : 0.0) * w;
      ch += xlogx(fv / m_ref_[j]) * m_ref_[j] * w;
      if (j + 1 < f.nv) {
        const double fr = f.at(i, j + 1);
        if (fv > 0.0 && fr > 0.0) {
          const double grad = (fr - fv) / sv_.dv;
          cf += grad * grad / (0.5 * (fv + fr)) * sv_.dv;
        }
      }
    }
    mass += cm * dx;
    momentum += cp * dx;
    kinetic += ck * dx;
    entropy += ce * dx;
    rel_entropy += ch * dx;
    fisher += cf * dx;
    nx_moment += n * cp * dx;
  }
  row.mass = mass;
  row.momentum = momentum;
  row.kinetic_energy = kinetic;
  row.entropy = entropy;
  row.rel_entropy = rel_entropy;
  row.fisher = fisher;
  row.nx_moment = nx_moment;
  row.min_f = fmin;

  if (report) {
    row.left = wall_columns(report->left, walls_.left);
    row.right = wall_columns(report->right, walls_.right);
    row.face_l2 = report->interior_l2_face_sum;
    row.bgk_entropy = report->bgk_entropy_production;
    if (report->field) row.field_energy = report->field->energy;
  }

  if (!rows_.empty()) {
    const LedgerRow& prev = rows_.back();
    const double dt = row.dt;
    row.cum_alpha_dg = prev.cum_alpha_dg +
                       dt * (row.left.alpha * row.left.dg + row.right.alpha * row.right.dg);
    row.cum_fisher = prev.cum_fisher + dt * cfg_.nu * row.fisher;
    row.cum_bgk_entropy = prev.cum_bgk_entropy + dt * row.bgk_entropy;
    row.cum_flux_l2 = prev.cum_flux_l2 + dt * (row.left.flux_l2 + row.right.flux_l2);
    row.cum_sqrt_phi = prev.cum_sqrt_phi + dt * (row.left.sqrt_phi + row.right.sqrt_phi);
    row.cum_sqrt1p_l2 = prev.cum_sqrt1p_l2 + dt * (row.left.sqrt1p_l2 + row.right.sqrt1p_l2);
    row.cum_face_l2 = prev.cum_face_l2 + dt * row.face_l2;
    row.cum_kinetic = prev.cum_kinetic + dt * row.kinetic_energy;
  }

  ensure_finite(row.mass, "mass");
  ensure_finite(row.momentum, "momentum");
  ensure_finite(row.kinetic_energy, "kinetic_energy");
  ensure_finite(row.entropy, "entropy");
  ensure_finite(row.rel_entropy, "rel_entropy");
  ensure_finite(row.field_energy, "field_energy");
  ensure_finite(row.fisher, "fisher");
  ensure_finite(row.bgk_entropy, "bgk_entropy");
  ensure_finite(row.left.dg, "left_dg");
  ensure_finite(row.right.dg, "right_dg");
  ensure_finite(row.left.entropy_flux, "left_entropy_flux");
  ensure_finite(row.right.entropy_flux, "right_entropy_flux");
  ensure_finite(row.left.flux_l1, "left_flux_l1");
  ensure_finite(row.right.flux_l1, "right_flux_l1");

  rows_.push_back(std::move(row));
  return rows_.back();
}

std::string DiagnosticsLedger::csv_header() {
  std::string h = "step,time,dt,mass,momentum,kinetic_energy,entropy,rel_entropy,"
                  "field_energy,fisher,bgk_entropy";
  for (const char* side : {"left", "right"}) {
    for (const char* col :
         {"phi", "alpha", "dg", "flux_l1", "flux_l2", "flux_l1_in", "flux_l2_in",
          "sqrt_phi", "entropy_flux", "bc_margin", "sqrt1p_l2"}) {
      h += ',';
      h += side;
      h += '_';
      h += col;
    }
  }
  h += ",nx_moment,face_l2,cum_alpha_dg,cum_fisher,cum_bgk_entropy,cum_flux_l2,"
       "cum_sqrt_phi,cum_sqrt1p_l2,cum_face_l2,cum_kinetic,min_f";
  return h;
}

void DiagnosticsLedger::write_csv(std::ostream& os) const {
  os << csv_header() << '\n';
  for (const LedgerRow& r : rows_) {
    os << r.step << ',' << fmt(r.time) << ',' << fmt(r.dt) << ',' << fmt(r.mass)
       << ',' << fmt(r.momentum) << ',' << fmt(r.kinetic_energy) << ','
       << fmt(r.entropy) << ',' << fmt(r.rel_entropy) << ',' << fmt(r.field_energy)
       << ',' << fmt(r.fisher) << ',' << fmt(r.bgk_entropy);
    for (const WallColumns* c : {&r.left, &r.right}) {
      os << ',' << fmt(c->phi) << ',' << fmt(c->alpha) << ',' << fmt(c->dg) << ','
         << fmt(c->flux_l1) << ',' << fmt(c->flux_l2) << ',' << fmt(c->flux_l1_in)
         << ',' << fmt(c->flux_l2_in) << ',' << fmt(c->sqrt_phi) << ','
         << fmt(c->entropy_flux) << ','
         << fmt(std::isfinite(c->bc_margin) ? c->bc_margin : 0.0) << ','
         << fmt(c->sqrt1p_l2);
    }
    os << ',' << fmt(r.nx_moment) << ',' << fmt(r.face_l2) << ','
       << fmt(r.cum_alpha_dg) << ',' << fmt(r.cum_fisher) << ','
       << fmt(r.cum_bgk_entropy) << ',' << fmt(r.cum_flux_l2) << ','
       << fmt(r.cum_sqrt_phi) << ',' << fmt(r.cum_sqrt1p_l2) << ','
       << fmt(r.cum_face_l2) << ',' << fmt(r.cum_kinetic) << ',' << fmt(r.min_f)
       << '\n';
  }
}

CheckReport check_entropy_balance(const DiagnosticsLedger& ledger,
                                  double alpha_hat, double balance_tol) {
  CheckReport report;
  report.name = "entropy_balance";
  const auto& rows = ledger.rows();
  if (rows.size() < 2) {
    report.add({"rows", false, static_cast<double>(rows.size()), 2.0,
                "need at least two rows"});
    return report;
  }

  const bool free_transport = !ledger.config().fokker_planck_active() &&
                              !ledger.config().bgk;
  const bool temps_match =
      ledger.walls().left.theta == ledger.theta_ref() &&
      ledger.walls().right.theta == ledger.theta_ref();
  if (!free_transport || !temps_match) {
    report.add({"applicable", true, 0.0, 0.0,
                "skipped: balance requires free transport and wall "
                "temperatures equal to the reference"});
    return report;
  }

  double max_increase = -std::numeric_limits<double>::infinity();
  double max_diff_form = -std::numeric_limits<double>::infinity();
  double max_residual = 0.0;
  double max_signed = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double dh = rows[k].rel_entropy - rows[k - 1].rel_entropy;
    const double dt = rows[k].dt;
    const double flux = rows[k].left.entropy_flux + rows[k].right.entropy_flux;
    const double dg = rows[k].left.dg + rows[k].right.dg;
    max_increase = std::max(max_increase, dh);
    max_diff_form = std::max(max_diff_form, dh / dt + alpha_hat * dg);
    max_residual = std::max(max_residual, std::abs(dh / dt + flux));
    max_signed = std::max(max_signed, dh / dt + flux);
  }
  report.add({"h_monotone", max_increase <= 1e-8, max_increase, 1e-8,
              "max per-step increase of H"});
  report.add({"differential_dissipation", max_diff_form <= 1e-8, max_diff_form,
              1e-8, "max of dH/dt + alpha_hat (E_L + E_R)"});
  // The residual magnitude is the numerical entropy dissipation of the
  // upwind step: one-signed (next item), O(dx) on smooth data, but O(1)
  // during wall boundary-layer transients. Reported against balance_tol;
  // the refinement order is asserted in the test suite on smooth data.
  report.add({"balance_residual", true, max_residual, balance_tol,
              "max |dH/dt + boundary entropy flux| (reported; numerical "
              "entropy dissipation)"});
  report.add({"dissipation_sign", max_signed <= 1e-10, max_signed, 1e-10,
              "dH/dt + boundary entropy flux must be <= 0"});

  const double budget = rows.front().rel_entropy - rows.back().rel_entropy + 1e-6;
  const double cum = rows.back().cum_alpha_dg;
  report.add({"cumulative_dg_bounded", cum <= budget, cum, budget,
              "cumulative alpha E vs H(0) - H(end) + 1e-6"});
  return report;
}

CheckReport check_trace_moment_bound(const DiagnosticsLedger& ledger) {
  CheckReport report;
  report.name = "trace_moment_bound";
  const auto& rows = ledger.rows();
  const VelocityGrid& sv = ledger.velocity();

  for (const WallSpec* spec : {&ledger.walls().left, &ledger.walls().right}) {
    double c1_den = 0.0, c2 = 0.0;
    for (int j : spec->wq.incoming) {
      const double v = sv.nodes[j];
      c1_den += spec->wq.m[j] * v * v * sv.weights[j];
      c2 += spec->wq.m[j] * (1.0 + v * v) * std::abs(v) * sv.weights[j];
    }
    const double c1 = 1.0 / c1_den;
    const std::string side = wall_name(spec->wall);
    report.add({side + "_c1", true, c1, 0.0, "discrete C1 = 1/sum_in M v^2 w"});
    report.add({side + "_c2", true, c2, 0.0, "discrete C2 = sum_in M (1+v^2)|v| w"});

    if (pure_diffuse(*spec)) {
      double worst6 = 0.0, worst7 = 0.0;
      for (std::size_t k = 1; k < rows.size(); ++k) {
        const WallColumns& c =
            spec->wall == Wall::left ? rows[k].left : rows[k].right;
        const double scale = std::max(1.0, c.phi);
        worst6 = std::max(worst6, std::abs(c.phi - c1 * c.flux_l2_in) / scale);
        worst7 = std::max(worst7, std::abs(c.flux_l1_in - c2 * c.phi) / scale);
      }
      report.add({side + "_ftbd6", worst6 <= 1e-12, worst6, 1e-12,
                  "phi~ = C1 sum_in gamma_- v^2 w (pure diffuse)"});
      report.add({side + "_ftbd7", worst7 <= 1e-12, worst7, 1e-12,
                  "sum_in gamma_- (1+v^2)|v| w = C2 phi~ (pure diffuse)"});
    } else {
      report.add({side + "_ftbd6", true, 0.0, 0.0, "skipped: wall not pure diffuse"});
    }
  }

  const bool free_transport =
      !ledger.config().fokker_planck_active() && !ledger.config().bgk;
  if (free_transport && rows.size() >= 2) {
    // Exact discrete moment identity of the upwind step: testing against
    // n(x) v with n linear in x gives, per step,
    //   d(nx_moment) = -dt (1 - dx/Lx) (lambda2_L + lambda2_R)
    //                  + dt (2 dx/Lx) face_l2.
    const double dx = ledger.spatial().dx;
    const double lx = ledger.spatial().length;
    double cum_wall = 0.0;
    for (std::size_t k = 1; k < rows.size(); ++k)
      cum_wall += rows[k].dt * (rows[k].left.flux_l2 + rows[k].right.flux_l2);
    const double lhs = (1.0 - dx / lx) * cum_wall;
    const double rhs = rows.front().nx_moment - rows.back().nx_moment +
                       (2.0 * dx / lx) * rows.back().cum_face_l2;
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    const double residual = std::abs(lhs - rhs) / scale;
    report.add({"ftbd5_identity", residual <= 1e-10, residual, 1e-10,
                "cumulative wall lambda_2 flux vs interior moments"});
    report.add({"ftbd5_bound", lhs <= rhs + 1e-10 * scale, lhs, rhs,
                "time-integrated lambda_2 flux bounded by FTbd5 right side"});
  } else {
    report.add({"ftbd5_identity", true, 0.0, 0.0,
                "skipped: identity stated for the pure transport step"});
  }
  return report;
}

CheckReport check_sqrt_trace_bound(const DiagnosticsLedger& ledger) {
  CheckReport report;
  report.name = "sqrt_trace_bound";
  const auto& rows = ledger.rows();
  const VelocityGrid& sv = ledger.velocity();

  for (const WallSpec* spec : {&ledger.walls().left, &ledger.walls().right}) {
    const std::string side = wall_name(spec->wall);
    const double alpha_bar = spec->law.lower_bound();

    double worst_margin = std::numeric_limits<double>::infinity();
    double cum_sqrt = 0.0, cum_witness = 0.0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const WallColumns& c = spec->wall == Wall::left ? rows[k].left : rows[k].right;
      worst_margin = std::min(worst_margin, c.bc_margin);
      cum_sqrt += rows[k].dt * c.sqrt_phi;
      cum_witness += rows[k].dt * c.sqrt1p_l2;
    }
    if (rows.size() < 2) worst_margin = 0.0;

    double cw = 0.0;
    for (int j : spec->wq.incoming)
      cw += std::sqrt(spec->wq.m[j]) * sv.nodes[j] * sv.nodes[j] * sv.weights[j];
    cw *= std::sqrt(alpha_bar);

    report.add({side + "_pointwise_lower_bound", worst_margin >= -1e-12,
                worst_margin, -1e-12, "min over steps and nodes of gamma_- - alpha_bar M phi~"});
    const double bound = cum_witness / cw;
    report.add({side + "_cumulative_sqrt_flux", cum_sqrt <= bound + 1e-10,
                cum_sqrt, bound,
                "cum sqrt(phi~) vs cum sum_in sqrt(1+gamma_-) v^2 w / C_w"});
  }
  return report;
}

CheckReport check_weighted_collision_bound(const DistributionFunction& f,
                                           const SpatialGrid& sx,
                                           const VelocityGrid& sv,
                                           double tau, double radius) {
  CheckReport report;
  report.name = "weighted_collision_bound";
  (void)sx;
  const double floor = 1e-300;
  double worst = 0.0;
  double gain_loss_gap = 0.0;
  for (int i = 0; i < f.nx; ++i) {
    std::vector<double> g = bgk_local_maxwellian(f, sv, i);
    if (g.empty()) continue;  // vacuum cell: 0 <= 0
    double gain = 0.0, loss = 0.0, rhs = 0.0;
    for (int j = 0; j < f.nv; ++j) {
      const double v = sv.nodes[j];
      const double w = sv.weights[j];
      const double fj = f.at(i, j);
      if (std::abs(v) <= radius) {
        gain += (g[j] / tau) / (1.0 + fj) * w;
        loss += (fj / tau) / (1.0 + fj) * w;
      }
      const double fs = std::max(fj, floor);
      const double gs = std::max(g[j], floor);
      const double e = (gs - fs) * (std::log(gs) - std::log(fs)) / tau;
      rhs += ((1.0 + v * v) * fj + e) * w;
    }
    if (rhs > 0.0) worst = std::max(worst, std::max(gain, loss) / rhs);
    gain_loss_gap = std::max(gain_loss_gap, std::abs(gain - loss));
  }
  report.add({"c_r", std::isfinite(worst), worst, 0.0,
              "smallest C_R with Q+-/(1+f) <= C_R [(1+v^2) f + e(f)] per cell"});
  report.add({"gain_loss_gap", true, gain_loss_gap, 0.0,
              "max |gain - loss| of the weighted split (0 at equilibrium)"});
  return report;
}

CheckReport check_boundedness(const DiagnosticsLedger& ledger) {
  CheckReport report;
  report.name = "boundedness";
  const auto& rows = ledger.rows();
  if (rows.empty()) {
    report.add({"rows", false, 0.0, 1.0, "empty ledger"});
    return report;
  }
  struct Column {
    const char* name;
    double (*get)(const LedgerRow&);
  };
  const Column columns[] = {
      {"mass", [](const LedgerRow& r) { return r.mass; }},
      {"kinetic_energy", [](const LedgerRow& r) { return r.kinetic_energy; }},
      {"entropy", [](const LedgerRow& r) { return r.entropy; }},
      {"rel_entropy", [](const LedgerRow& r) { return r.rel_entropy; }},
      {"field_energy", [](const LedgerRow& r) { return r.field_energy; }},
      {"cum_alpha_dg", [](const LedgerRow& r) { return r.cum_alpha_dg; }},
      {"cum_fisher", [](const LedgerRow& r) { return r.cum_fisher; }},
      {"cum_bgk_entropy", [](const LedgerRow& r) { return r.cum_bgk_entropy; }},
  };
  for (const Column& col : columns) {
    const double anchor = 10.0 * std::max(std::abs(col.get(rows.front())), 1.0);
    double worst = -std::numeric_limits<double>::infinity();
    bool finite = true;
    for (const LedgerRow& r : rows) {
      const double v = col.get(r);
      finite = finite && std::isfinite(v);
      worst = std::max(worst, std::abs(v));
    }
    report.add({col.name, finite && worst <= anchor, worst, anchor,
                "sup over steps vs 10 x max(initial value, 1)"});
  }
  return report;
}

CheckReport check_mass_conservation(const DiagnosticsLedger& ledger, double tol) {
  CheckReport report;
  report.name = "mass_conservation";
  const auto& rows = ledger.rows();
  if (rows.empty()) {
    report.add({"rows", false, 0.0, 1.0, "empty ledger"});
    return report;
  }
  const double m0 = rows.front().mass;
  double worst = 0.0;
  for (const LedgerRow& r : rows)
    worst = std::max(worst, std::abs(r.mass - m0) / std::max(m0, 1e-300));
  report.add({"relative_drift", worst <= tol, worst, tol,
              "max |mass(t) - mass(0)| / mass(0)"});
  return report;
}

}  // namespace kinslab
