#include "kinslab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kinslab/parallel.hpp"
#include "kinslab/weakconv.hpp"

namespace kinslab {

namespace {

using nlohmann::json;

json check_to_json(const CheckReport& report) {
  json items = json::array();
  for (const CheckItem& item : report.items) {
    items.push_back({{"name", item.name},
                     {"pass", item.pass},
                     {"value", item.value},
                     {"tolerance", item.tolerance},
                     {"detail", item.detail}});
  }
  return {{"name", report.name}, {"pass", report.pass}, {"items", items}};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_snapshot(const std::string& path, const DistributionFunction& f,
                    const Scenario& s) {
  std::ofstream os(path);
  os << "# kinslab final state\n";
  os << "# time " << fmt(f.time) << "\n";
  os << "# nx nv lx v_max\n";
  os << f.nx << ' ' << f.nv << ' ' << fmt(s.lx) << ' ' << fmt(s.v_max) << "\n";
  for (int i = 0; i < f.nx; ++i) {
    for (int j = 0; j < f.nv; ++j) {
      if (j) os << ' ';
      os << fmt(f.at(i, j));
    }
    os << '\n';
  }
}

}  // namespace

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  RunResult result;
  set_worker_count(std::max(1, options.threads));

  if (options.check_only) return result;

  const std::string out_dir = options.out_dir.empty() ? scenario.out : options.out_dir;
  std::filesystem::create_directories(out_dir);
  result.ledger_path = out_dir + "/ledger.csv";
  result.summary_path = out_dir + "/summary.json";
  result.snapshot_path = out_dir + "/final_state.txt";

  const SpatialGrid sx = build_spatial_grid(scenario.lx, scenario.nx);
  const VelocityGrid sv = build_velocity_grid(scenario.v_max, scenario.nv);
  Walls walls{make_wall_spec(sv, Wall::left, scenario.left.theta,
                             scenario.left.kind, scenario.left.law),
              make_wall_spec(sv, Wall::right, scenario.right.theta,
                             scenario.right.kind, scenario.right.law)};
  DistributionFunction f = initial_condition(scenario.ic, sx, sv);
  DiagnosticsLedger ledger(sx, sv, walls, scenario.model);

  // C0: mass + energy + entropy of the initial datum
  {
    double c0 = 0.0;
    for (int i = 0; i < f.nx; ++i)
      for (int j = 0; j < f.nv; ++j) {
        const double v = sv.nodes[j];
        const double fv = f.at(i, j);
        const double logterm = fv > 0.0 ? std::abs(std::log(fv)) : 0.0;
        c0 += fv * (1.0 + v * v + logterm) * sv.weights[j] * sx.dx;
      }
    result.c0 = c0;
  }

  StepReport init_report;
  init_report.dt = 0.0;
  std::vector<double> efield;
  if (scenario.model.poisson) {
    Moments m = density_moments(f, sv);
    FieldState fs = solve_poisson(m.rho, sx);
    fs.current = std::move(m.current);
    efield.resize(sx.cell_count);
    for (int i = 0; i < sx.cell_count; ++i) efield[i] = fs.grad_center(i);
    init_report.field = std::move(fs);
  }

  long steps = 0;
  try {
    ledger.record(f, &init_report);
    const double dt_transport = max_dt_transport(sx, sv);
    while (f.time < scenario.t_final - 1e-12 * scenario.t_final) {
      double dt;
      if (scenario.dt > 0.0) {
        dt = scenario.dt;
      } else {
        dt = dt_transport;
        if (scenario.model.fokker_planck_active())
          dt = std::min(dt, max_dt_fokker_planck(
                                sx, sv, scenario.model.nu, scenario.model.lambda,
                                scenario.model.poisson ? &efield : nullptr));
        if (scenario.model.bgk) dt = std::min(dt, scenario.model.tau);
        dt *= scenario.cfl_factor;
      }
      dt = std::min(dt, scenario.t_final - f.time);

      StepReport report = step(f, sx, sv, scenario.model, walls, dt);
      if (report.field) {
        efield.resize(sx.cell_count);
        for (int i = 0; i < sx.cell_count; ++i)
          efield[i] = report.field->grad_center(i);
      }
      ledger.record(f, &report);
      ++steps;
    }
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg << e.what() << " (step " << steps << ")";
    result.error = msg.str();
    result.exit_code = 1;
  }
  result.steps = steps;
  result.t_final = f.time;

  {
    std::ofstream os(result.ledger_path);
    ledger.write_csv(os);
  }
  write_snapshot(result.snapshot_path, f, scenario);

  const bool free_transport =
      !scenario.model.fokker_planck_active() && !scenario.model.bgk;
  const double mass_tol = free_transport ? 1e-10 : 1e-8;
  const double alpha_hat = std::min(scenario.left.law.lower_bound(),
                                    scenario.right.law.lower_bound());

  if (result.error.empty()) {
    result.checks.push_back(check_mass_conservation(ledger, mass_tol));
    result.checks.push_back(check_entropy_balance(ledger, alpha_hat));
    result.checks.push_back(check_trace_moment_bound(ledger));
    result.checks.push_back(check_sqrt_trace_bound(ledger));
    result.checks.push_back(check_boundedness(ledger));
    if (scenario.model.bgk)
      result.checks.push_back(check_weighted_collision_bound(
          f, sx, sv, scenario.model.tau, scenario.v_max));
    for (const CheckReport& c : result.checks)
      result.checks_passed = result.checks_passed && c.pass;
    if (!result.checks_passed) result.exit_code = 4;
  } else {
    result.checks_passed = false;
  }

  // run-level maxima of the main ledger columns
  json run_max = json::object();
  {
    double mass = 0, kinetic = 0, entropy = 0, rel_entropy = 0, field = 0;
    for (const LedgerRow& r : ledger.rows()) {
      mass = std::max(mass, r.mass);
      kinetic = std::max(kinetic, r.kinetic_energy);
      entropy = std::max(entropy, r.entropy);
      rel_entropy = std::max(rel_entropy, r.rel_entropy);
      field = std::max(field, r.field_energy);
    }
    run_max = {{"mass", mass},
               {"kinetic_energy", kinetic},
               {"entropy", entropy},
               {"rel_entropy", rel_entropy},
               {"field_energy", field}};
  }

  json summary;
  summary["schema_version"] = 1;
  summary["scenario"] = serialize_scenario(scenario);
  summary["run"] = {{"steps", result.steps},
                    {"t_final", result.t_final},
                    {"c0", result.c0},
                    {"error", result.error}};
  summary["constants"] = {{"C0", result.c0}, {"run_max", run_max}};
  json checks = json::array();
  for (const CheckReport& c : result.checks) checks.push_back(check_to_json(c));
  summary["checks"] = checks;
  summary["all_checks_passed"] = result.checks_passed;
  {
    std::ofstream os(result.summary_path);
    os << summary.dump(2) << '\n';
  }
  return result;
}

std::string weakconv_demo(const WeakconvDemoOptions& options) {
  GridFunctionSequence seq;
  int clipped_total = 0;
  if (options.family == "concentration") {
    seq = make_concentration_family(options.terms, options.resolution);
  } else if (options.family == "oscillation") {
    seq = make_oscillation_family(options.terms, options.resolution);
    for (long n = 1; n <= options.terms; ++n) {
      int c = 0;
      oscillation_blowup_sequence(n, options.resolution, &c);
      clipped_total += c;
    }
  } else if (options.family == "constant") {
    seq = make_constant_family(options.terms, options.resolution);
  } else {
    throw std::invalid_argument("weakconv: unknown family '" + options.family + "'");
  }

  RenormEstimate est = estimate_renormalized_limit(seq, options.levels, options.basis);
  BitingResult biting = biting_set_search(seq, options.eps, options.ui_constant,
                                          options.cells);

  json levels = json::array();
  for (const WeakLimitEstimate& e : est.levels) {
    levels.push_back({{"level", e.level},
                      {"basis_size", e.basis_size},
                      {"limit", e.limit},
                      {"dispersion", e.dispersion},
                      {"flagged", e.flagged}});
  }
  json delta = json::array();
  for (const auto& [m, d] : biting.delta_table)
    delta.push_back({{"level", m}, {"measure", d}});

  json report;
  report["family"] = options.family;
  report["terms"] = options.terms;
  report["resolution"] = options.resolution;
  report["estimates"] = levels;
  report["monotonicity_violations"] = est.monotonicity_violations;
  report["top_increment"] = est.top_increment;
  report["renormalized_limit_unbounded"] = est.unbounded_hint;
  report["biting"] = {{"verdict", biting.verdict},
                      {"found", biting.found},
                      {"kept_measure", biting.kept_measure},
                      {"kept_cells", biting.kept_cells},
                      {"cell_count", biting.cell_count},
                      {"worst_stat", biting.worst_stat},
                      {"worst_level", biting.worst_level}};
  report["asymptotic_l0_table"] = delta;
  if (options.family == "oscillation") report["clipped_samples"] = clipped_total;
  return report.dump(2);
}

}  // namespace kinslab
