#pragma once

#include "spsolve/runconfig.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace spsolve {

struct RunOutcome {
  int exit_code = 0; // 0 converged, 1 config error, 2 non-converged
  std::vector<std::string> files;
  std::string message;
};

// Dispatches the configured solve and writes the requested artifacts
// (profile CSV, report JSON, SVG panels) under cfg.out_directory.
RunOutcome run(const RunConfig& cfg);

// One solve per axis value, fanned out over a worker pool; rows are ordered
// by axis value and produced even when a point fails to converge.
// axis is one of lambda, q, kbar, m, mu.
RunOutcome sweep(const RunConfig& cfg, const std::string& axis,
                 std::vector<double> values, std::size_t threads);

// Renders SVG panels from a profile or sweep CSV.
RunOutcome plot(const std::string& csv_path, const std::string& out_dir);

// Built-in invariant battery; one pass/fail line per check on `log`.
// Returns 0 when every check passes, 2 otherwise.
int verify(std::ostream& log);

} // namespace spsolve
