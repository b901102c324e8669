#pragma once

#include "spsolve/params.hpp"
#include "spsolve/radial_grid.hpp"
#include "spsolve/solvers.hpp"
#include "spsolve/weights.hpp"

#include <string>
#include <vector>

namespace spsolve {

enum class SolveMode {
  groundstate,
  continuation,
  mountain_pass,
  excited,
  nonexistence,
  verify,
};

SolveMode parse_mode(const std::string& name);
std::string mode_name(SolveMode mode);

//==============================================================================
//! A batch run description. Parsed from a flat TOML-style key tree or JSON;
//! admissibility is checked before dispatch.
struct RunConfig {
  Params problem;
  std::vector<double> mu_ladder; // continuation rungs, empty = default 6 rungs
  WeightModel weight = WeightModel::make_constant(1.0);

  // default truncation keeps e^{-r_max} below 1e-10 of the field scale
  double r_max = 24.0;
  std::size_t n = 1024;
  Spacing spacing = Spacing::uniform;

  SolveMode mode = SolveMode::groundstate;
  SolveOptions solver;
  std::size_t nodes = 1;      // excited-state sign changes
  std::size_t path_nodes = 32;
  std::size_t sweeps = 200;

  std::string init_kind = "gaussian"; // gaussian | random
  double init_amplitude = 1.0;
  double init_width = 1.0;
  unsigned seed = 42;

  std::string out_directory = ".";
  std::vector<std::string> formats = {"csv", "json"}; // csv | json | svg
};

// Parses TOML-subset ([section], key = value, numbers / strings / arrays /
// booleans) or JSON (by content sniff / .json extension). Throws
// std::runtime_error with the offending key on malformed input; throws
// std::invalid_argument citing the violated constraint on inadmissible
// parameters.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, bool as_json);

// Validation used by load_config; public so drivers can re-check after
// programmatic edits.
void validate_config(const RunConfig& cfg);

} // namespace spsolve
