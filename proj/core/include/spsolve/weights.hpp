#pragma once

#include "spsolve/radial_grid.hpp"

#include <optional>

namespace spsolve {

enum class WeightKind {
  constant,       // rho = c >= 0
  homogeneous,    // rho = a r^kbar, kbar > 0  (rho(t r) = t^kbar rho(r) exactly)
  coercive,       // rho = offset + a r^p, p > 0  (rho -> inf, sublevels bounded)
  vanishing_ball, // rho = 0 on [0, r0], then rho_inf * min(1, r - r0)
};

//==============================================================================
//! The coefficient rho. Radial only; nonnegative and locally bounded by
//! construction. mbar is the sublevel threshold of the vanishing hypothesis.
struct WeightModel {
  WeightKind kind = WeightKind::constant;
  double c = 1.0;         // constant value
  double kbar = 1.0;      // homogeneity degree
  double amplitude = 1.0; // homogeneous / coercive amplitude
  double power = 2.0;     // coercive growth exponent
  double offset = 0.0;    // coercive offset
  double r0 = 1.0;        // vanishing-ball radius
  double rho_inf = 1.0;   // vanishing-ball limit value
  std::optional<double> mbar;

  double operator()(double r) const;

  // Degree under which the model is exactly homogeneous, if any
  // (constant -> 0, homogeneous -> kbar).
  std::optional<double> homogeneity_degree() const;

  static WeightModel make_constant(double c);
  static WeightModel make_homogeneous(double kbar, double amplitude = 1.0);
  static WeightModel make_coercive(double amplitude, double power,
                                   double offset = 0.0);
  static WeightModel make_vanishing_ball(double r0, double rho_inf,
                                         std::optional<double> mbar = {});
};

double eval_weight(const WeightModel& model, double r);

struct WeightClassReport {
  bool satisfies_rho1 = false; // zero set has interior AND {rho <= mbar} bounded in-grid
  bool satisfies_rho2 = false; // every tested sublevel bounded within r_max
  double homogeneity_residual = 0.0;
};

WeightClassReport verify_weight_class(const WeightModel& model,
                                      const RadialGrid& grid);

} // namespace spsolve
