#pragma once

#include "spsolve/functionals.hpp"

#include <string>

namespace spsolve {

//==============================================================================
//! Closed-form constants of the vanishing-weight regime (N = 3).
struct ConstantsReport {
  double sobolev_S = 0.0;  // S = 3 (pi/2)^{4/3}, N = 3
  double s_q1 = 0.0;       // numerical best H1 -> L^{q+1} constant
  double s_lambda = 0.0;
  double lambda1 = 0.0;
  double cbar_level = 0.0; // cbar
  double Cbar = 0.0;
  std::optional<double> alpha; // empirical proxy only, never closed-form
};

// S = 3 (pi/2)^{4/3}; the N = 3 constant in S (int u^6)^{1/3} <= int |grad u|^2.
double sobolev_S3();

// S_lambda = (q-2) [3(q+1)]^{-3/(q-2)} (2(5-q)/(lambda Mbar))^{(5-q)/(q-2)},
// q in [3, 5). Strictly decreasing in lambda and Mbar.
double s_lambda_const(double q, double lambda, double mbar);

// Smallest lambda with S_lambda <= S^3 / (4 Cbar^4), by inverting the closed
// form (monotone in lambda).
double lambda1_threshold(double q, double mbar, double Cbar);

struct CbarResult {
  double cbar = 0.0; // max_{t>=0} I_0(t v)
  double Cbar = 0.0; // uniform E-norm bound for PS sequences at level c_lambda
};

// v must be nontrivial with support inside the zero set of rho. For q > 3 the
// bound combines ||u||_H1^2 <= 2(q+1)cbar/(q-1) and
// lambda^2 int rho phi u^2 <= 4(q+1)cbar/(q-3); at q = 3 the Coulomb part goes
// through the Sobolev route of the uniform-bound lemma (needs S_{q+1}).
CbarResult cbar_pipeline(double q, const Params& p, const WeightModel& rho_vanishing,
                         const Field& v);

struct AprioriBounds {
  double delta_max = 0.0; // bound on mu int |u|^{q+1}
  double gamma_max = 0.0; // bound on lambda^2 int rho phi u^2
  double alpha_of = 0.0;  // alpha = delta - gamma at the bounds (audit value)
};

// From the (Nehari, level, Pohozaev) linear system at level c; requires
// 2(q-2) + k(q-1) > 0.
AprioriBounds apriori_bounds(double c, double k, double q, int dim);

// (max{N/4, 1/(q-1)} (3-q) - 1)_+, the homogeneity-degree threshold.
double kbar_threshold(int dim, double q);

struct TailMass {
  double a_part = 0.0;  // int |u|^3 over {r > R, rho >= M}
  double b_part = 0.0;  // int |u|^3 over {r > R, rho < M}
  double bound_a = 0.0; // omega^{-1/2} ||u||_E^3 / (lambda M)
};

TailMass tail_mass(const Field& u, const WeightModel& rho, double R, double M,
                   double lambda);

// inf ||u||_H1 / ||u||_{q+1} on the grid, by normalized preconditioned descent.
// q+1 in (2, 2*].
double sobolev_best_constant(double q, std::shared_ptr<const RadialGrid> grid);

struct CriticalAudit {
  bool infeasible = false;
  // Nehari + Pohozaev combination coefficients on (int |grad u|^2, int u^2,
  // lambda^2 int rho phi u^2) and their signs.
  double coef_grad = 0.0, coef_mass = 0.0, coef_coulomb = 0.0;
  std::string explanation;
};

// q = 2*-1 only: with k >= (N-6)/2 the combination forces int u^2 <= 0, so
// (u, phi_u) = (0, 0).
CriticalAudit critical_nonexistence_audit(const Params& p, double k);

// Gathers every vanishing-regime constant for one (q, lambda, Mbar) and a
// zero-set test profile v: S, the grid best constant S_{q+1}, S_lambda,
// lambda_1, cbar and Cbar. alpha stays empty (defined only through an
// existence argument; solvers expose an empirical proxy instead).
ConstantsReport constants_report(double q, double lambda, double mbar,
                                 const WeightModel& rho_vanishing, const Field& v);

} // namespace spsolve
