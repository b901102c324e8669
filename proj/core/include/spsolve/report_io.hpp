#pragma once

#include "spsolve/diagnostics.hpp"
#include "spsolve/runconfig.hpp"
#include "spsolve/solvers.hpp"

#include <string>
#include <vector>

namespace spsolve {

// Lossless double formatting (17 significant digits, C locale).
std::string format_double(double x);

// Columns r,u,phi; '.' decimal, ',' separator, header row, LF endings.
void write_profile_csv(const std::string& path, const Field& u, const Field& phi);

struct ProfileData {
  std::vector<double> r, u, phi;
};
ProfileData read_profile_csv(const std::string& path);

// All SolveReport fields; doubles survive a JSON round trip bit-exactly.
void write_report_json(const std::string& path, const RunConfig& cfg,
                       const SolveReport& rep);
double read_report_level(const std::string& path);

void write_constants_json(const std::string& path, const ConstantsReport& rep);

struct SweepRow {
  double value = 0.0;
  double level = 0.0;
  double grad_residual = 0.0;
  double nehari_residual = 0.0;
  double pohozaev_residual = 0.0;
  bool converged = false;
};
void write_sweep_csv(const std::string& path, const std::string& axis,
                     const std::vector<SweepRow>& rows);

//==============================================================================
// Deterministic SVG line charts: fixed 800x600 canvas, fixed formatting, no
// timestamps — byte-identical output for identical input.
struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::vector<SvgSeries>& series);

} // namespace spsolve
