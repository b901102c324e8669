#pragma once

#include "spsolve/functionals.hpp"

#include <array>

namespace spsolve {

//==============================================================================
//! Energy along the scaling family t -> t^nu u(t .) for homogeneous rho:
//!   f(t) = a t^{2nu+2-N} + b t^{2nu-N} + c t^{4nu-N-2-2kbar} - d t^{nu(q+1)-N},
//! a, b, d > 0, c >= 0, the d-exponent strictly dominant, so f has a unique
//! interior maximum and f -> -inf.
struct FiberPolynomial {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  std::array<double, 4> exponents{}; // (2nu+2-N, 2nu-N, 4nu-N-2-2kbar, nu(q+1)-N)

  double eval(double t) const;
  double derivative(double t) const;
};

// Samples of t^nu u(t r) on u's own grid; cubic interpolation, zero extension
// beyond r_max, even reflection below the first node. Throws for t <= 0.
Field scale_field(const Field& u, double t, double nu);

// a = 1/2 int |grad u|^2, b = 1/2 int u^2, c = (lambda^2/4) int rho phi u^2,
// d = (mu/(q+1)) int |u|^{q+1}. Throws for non-homogeneous rho, u == 0, or
// inadmissible (nu, kbar).
FiberPolynomial fiber_coeffs(const Field& u, const Params& p,
                             const WeightModel& rho);

// The unique t* > 0 with f'(t*) = 0. Solved in the concavity variable
// s = t^{p_max} by guarded Newton with bisection fallback, |ds|/s <= 1e-12.
double fiber_argmax(const FiberPolynomial& fp);

// t* > 0 with G(t* u) = 0: t^2 A + t^4 B = t^{q+1} C. Closed forms for
// lambda = 0 (any q > 1) and q = 3 (requires C > B); bracketed bisection for
// q > 3. Throws when no crossing exists or u == 0.
double nehari_project(const Field& u, const Params& p, const WeightModel& rho);

} // namespace spsolve
