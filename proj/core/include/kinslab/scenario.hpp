#pragma once

#include <string>

#include "kinslab/boundary.hpp"
#include "kinslab/solver.hpp"

namespace kinslab {

struct WallConfig {
  double theta = 1.0;
  LocalReflectKind kind = LocalReflectKind::specular;
  AccommodationLaw law;  // defaults to constant alpha = 1 (fully diffusing)

  bool operator==(const WallConfig&) const = default;
};

// One run: grids, walls, model switches, initial condition and loop control.
// Parsed from a flat sectioned key = value document; see parse_scenario.
struct Scenario {
  // [grid]
  double lx = 1.0;
  int nx = 64;
  double v_max = 8.0;
  int nv = 128;
  // [walls.left], [walls.right]
  WallConfig left;
  WallConfig right;
  // [model]
  ModelConfig model;
  // [run]
  InitialCondition ic;
  double t_final = 0.0;     // required, > 0
  double dt = 0.0;          // fixed time step; 0 selects auto-CFL
  double cfl_factor = 0.9;  // in (0, 1]
  unsigned long seed = 0;   // consumed by property-test tooling only
  std::string out = "out";

  bool operator==(const Scenario&) const = default;
};

// Parses the TOML-style scenario document: sections [grid], [walls.left],
// [walls.right], [model], [run]; '#' comments; booleans true/false; strings
// bare or double-quoted. Unknown keys are collected and reported in one
// error; constraint violations name the key and the bound.
Scenario parse_scenario(const std::string& text);

// Canonical serialization; parse(serialize(s)) == s for every valid s.
std::string serialize_scenario(const Scenario& s);

}  // namespace kinslab
