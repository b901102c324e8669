#pragma once

#include <vector>

namespace spsolve {

enum class Spacing { uniform, graded };

//==============================================================================
//! Radial discretization of R^N (N = 3,4,5) with quadrature weights such that
//!   integrate(g) = sum_i w_i g(r_i)  ~=  |S^{N-1}| int_0^{r_max} g(r) r^{N-1} dr.
//!
//! Composite trapezoid on the r^{N-1}-weighted integrand; the first node sits
//! at r[0] > 0 (never at the coordinate singularity) and the [0, r[0]] cell is
//! integrated with the integrand frozen at r[0] (r^{N-1} itself is integrated
//! exactly there). Order 2 under refinement.
struct RadialGrid {
  int dim = 3;                // N
  std::vector<double> r;      // strictly increasing, r.front() > 0, r.back() == r_max
  std::vector<double> w;      // quadrature weights, area element included
  std::vector<double> stiff;  // cached staggered stiffness coefficients
  double r_max = 0.0;

  std::size_t size() const { return r.size(); }
  double dr_min() const;      // smallest node spacing (including the [0, r0] cell)
};

// |S^{N-1}|: 4*pi, 2*pi^2, 8*pi^2/3 for N = 3, 4, 5.
double sphere_area(int dim);

// omega = (N-2) |S^{N-1}|, the Newtonian-kernel normalization.
double omega_const(int dim);

// 2* = 2N/(N-2).
double critical_exponent(int dim);

// Builds a grid on (0, r_max]. Graded spacing clusters nodes near r = 0
// (quadratic grading r_i ~ r_max (i/n)^2). Throws std::invalid_argument for
// dim outside {3,4,5}, r_max <= 0 or n < 16.
RadialGrid make_grid(int dim, double r_max, std::size_t n,
                     Spacing spacing = Spacing::uniform);

// sum_i w_i samples_i. Throws on length mismatch.
double integrate(const RadialGrid& grid, const std::vector<double>& samples);

// Staggered-form stiffness coefficients V_c / h_c^2 per cell (c = 0..n-2)
// with the ghost Dirichlet cell beyond r_max appended last; V_c is the exact
// shell volume. Returns the cached copy when the grid carries one.
std::vector<double> stiffness_coeffs(const RadialGrid& g);

} // namespace spsolve
