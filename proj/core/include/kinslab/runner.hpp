#pragma once

#include <string>
#include <vector>

#include "kinslab/diagnostics.hpp"
#include "kinslab/scenario.hpp"

namespace kinslab {

struct RunOptions {
  std::string out_dir;     // overrides scenario.out when non-empty
  bool check_only = false; // validate and echo the scenario, do not run
  int threads = 1;
};

struct RunResult {
  int exit_code = 0;        // 0 ok, 1 module error, 4 check failure
  long steps = 0;
  double t_final = 0.0;
  double c0 = 0.0;          // initial mass + energy + entropy functional
  bool checks_passed = true;
  std::string error;        // module error text, empty on success
  std::string ledger_path;
  std::string summary_path;
  std::string snapshot_path;
  std::vector<CheckReport> checks;
};

// Runs one scenario end to end: time loop with auto-CFL (or the fixed dt),
// per-step diagnostics, ledger CSV + summary JSON + plain-text final state.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options);

struct WeakconvDemoOptions {
  std::string family = "concentration";  // concentration | oscillation | constant
  int terms = 64;
  int resolution = 4096;
  int basis = 8;
  std::vector<double> levels = {1.0, 2.0, 4.0, 8.0};
  double eps = 0.1;
  double ui_constant = 4.0;
  int cells = 32;
};

// Weak-convergence laboratory report (JSON text): renormalized-limit
// estimates per level, dispersion and convergence flags, the biting-set
// verdict and the asymptotic L0 table.
std::string weakconv_demo(const WeakconvDemoOptions& options);

}  // namespace kinslab
