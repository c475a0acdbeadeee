#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kinslab/runner.hpp"
#include "kinslab/scenario.hpp"

namespace {

constexpr const char* kVersion = "kinslab 0.1.0";

int run_command(const std::string& scenario_path, const std::string& out_dir,
                bool check_only, int threads) {
  std::ifstream in(scenario_path);
  if (!in) {
    std::cerr << "error: cannot open scenario file '" << scenario_path << "'\n";
    return 2;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();

  kinslab::Scenario scenario;
  try {
    scenario = kinslab::parse_scenario(buffer.str());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  if (check_only) {
    std::cout << kinslab::serialize_scenario(scenario);
    return 0;
  }

  kinslab::RunOptions options;
  options.out_dir = out_dir;
  options.threads = threads;
  kinslab::RunResult result = kinslab::run_scenario(scenario, options);

  if (!result.error.empty()) {
    std::cerr << "error: " << result.error << '\n';
    return result.exit_code;
  }
  std::cout << "steps: " << result.steps << "  t_final: " << result.t_final
            << "  C0: " << result.c0 << '\n';
  for (const kinslab::CheckReport& check : result.checks)
    std::cout << (check.pass ? "PASS " : "FAIL ") << check.name << '\n';
  std::cout << "ledger:  " << result.ledger_path << '\n'
            << "summary: " << result.summary_path << '\n'
            << "state:   " << result.snapshot_path << '\n';
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-velocity kinetic slab solver with Maxwell walls"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(0, 1);

  std::string scenario_path, out_dir;
  bool check_only = false;
  int threads = 1;
  CLI::App* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("scenario", scenario_path, "scenario file")->required();
  run->add_option("--out", out_dir, "output directory (overrides run.out)");
  run->add_flag("--check-only", check_only, "validate and echo the scenario");
  run->add_option("--threads", threads, "worker threads for the update loops")
      ->check(CLI::PositiveNumber);

  kinslab::WeakconvDemoOptions wc;
  std::string levels_csv = "1,2,4,8";
  std::string wc_out;
  CLI::App* weakconv =
      app.add_subcommand("weakconv", "weak-convergence laboratory report");
  weakconv->add_option("family", wc.family, "concentration | oscillation | constant")
      ->required();
  weakconv->add_option("--terms", wc.terms, "sequence length")->check(CLI::PositiveNumber);
  weakconv->add_option("--grid", wc.resolution, "fine grid resolution")
      ->check(CLI::PositiveNumber);
  weakconv->add_option("--basis", wc.basis, "dyadic indicator basis size")
      ->check(CLI::PositiveNumber);
  weakconv->add_option("--levels", levels_csv, "truncation levels, comma separated");
  weakconv->add_option("--eps", wc.eps, "biting removal budget, in (0, 1/2)");
  weakconv->add_option("--ui-constant", wc.ui_constant,
                       "uniform-integrability threshold constant");
  weakconv->add_option("--cells", wc.cells, "dyadic cells of the biting search")
      ->check(CLI::PositiveNumber);
  weakconv->add_option("--out", wc_out, "write the JSON report to this file");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return run_command(scenario_path, out_dir, check_only, threads);

  if (weakconv->parsed()) {
    wc.levels.clear();
    std::stringstream ss(levels_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        wc.levels.push_back(std::stod(tok));
      } catch (const std::exception&) {
        std::cerr << "error: bad level '" << tok << "'\n";
        return 2;
      }
    }
    try {
      const std::string report = kinslab::weakconv_demo(wc);
      if (wc_out.empty()) {
        std::cout << report << '\n';
      } else {
        std::ofstream os(wc_out);
        os << report << '\n';
      }
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
    return 0;
  }

  std::cout << app.help();
  return 0;
}
