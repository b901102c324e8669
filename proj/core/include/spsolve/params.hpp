#pragma once

#include <optional>

namespace spsolve {

//==============================================================================
//! Problem parameters. b, c, d are the linear/Coulomb/power coefficients of
//! the general system (-Delta u + b u + c rho phi u = d |u|^{q-1} u); they
//! default to (1, lambda^2, 1), i.e. the equation itself.
struct Params {
  int dim = 3;
  double q = 4.0;       // power exponent, in (1, 2*-1]
  double lambda = 1.0;  // coupling, >= 0
  double mu = 1.0;      // perturbation weight on the power term, in [1/2, 1]
  std::optional<double> nu;   // fibering exponent
  std::optional<double> kbar; // weight homogeneity degree
  std::optional<double> k;    // Pohozaev inequality constant
  std::optional<double> b, c, d;

  double b_eff() const { return b.value_or(1.0); }
  double c_eff() const { return c.value_or(lambda * lambda); }
  double d_eff() const { return d.value_or(1.0); }
};

// nu > max{N/2, 2/(q-1)} and kbar in ((nu(3-q)-2)/2, (4nu-N-2)/2).
bool nu_admissible(int dim, double q, double nu, double kbar);

// Deterministic choice: nu = max{N/2, 2/(q-1)} + 1/2, bumped by 1/2 until the
// admissible interval contains kbar. Throws if no interval can contain it.
double default_nu(int dim, double q, double kbar);

} // namespace spsolve
