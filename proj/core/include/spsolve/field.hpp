#pragma once

#include "spsolve/radial_grid.hpp"

#include <functional>
#include <memory>
#include <random>
#include <vector>

namespace spsolve {

//==============================================================================
//! Samples of a radial profile on a shared grid. The radial extension is
//! understood to vanish beyond r_max (hard Dirichlet truncation).
struct Field {
  std::shared_ptr<const RadialGrid> grid;
  std::vector<double> v;

  Field() = default;
  explicit Field(std::shared_ptr<const RadialGrid> g)
      : grid(std::move(g)), v(grid->size(), 0.0) {}
  Field(std::shared_ptr<const RadialGrid> g, std::vector<double> values);

  std::size_t size() const { return v.size(); }
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }

  static Field from_function(std::shared_ptr<const RadialGrid> g,
                             const std::function<double(double)>& f);
};

Field operator*(double c, const Field& u);
Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);

enum class NormKind { H1, Lp, D12 };

// H1 = (int |u'|^2 + u^2)^{1/2}; Lp = (int |u|^p)^{1/p}; D12 = (int |u'|^2)^{1/2},
// all against the N-dimensional radial measure.
double norm(const Field& u, NormKind kind, double p = 2.0);

// First derivative by 3-point stencils: central (nonuniform-exact for
// quadratics) in the interior, one-sided second order at both ends.
Field radial_derivative(const Field& u);

// u'' + (N-1)/r u'. At the first node the 1/r term is regularized through the
// even reflection u(-r) = u(r), exact for even quadratics.
Field radial_laplacian(const Field& u, int dim);

//==============================================================================
// Staggered kinetic form: int |u'|^2 discretized cell-wise as
//   sum_c V_c ((u_{c+1} - u_c)/h_c)^2  +  V_g (u_{n-1}/h_g)^2,
// with V_c = |S^{N-1}| (r_{c+1}^N - r_c^N)/N the exact cell volume and a ghost
// Dirichlet cell beyond r_max carrying the zero extension. Unlike the centered
// derivative it penalizes node-scale oscillation, so it is the form used by
// every energy; u'(0) = 0 symmetry makes the inner [0, r_0] cell contribution
// O(dr^5) and it is dropped.
double kinetic_quadratic(const Field& u);

// out = K u where K is the (tridiagonal) operator of the staggered form, i.e.
// the Euclidean gradient of 1/2 kinetic_quadratic. Divide by w for the L2
// gradient field.
void apply_stiffness(const RadialGrid& g, const std::vector<double>& u,
                     std::vector<double>& out);

// Seeded sum of three Gaussian bumps, used by property suites and verify mode.
Field random_smooth_field(std::shared_ptr<const RadialGrid> g, std::mt19937& rng);

// amplitude * exp(-r^2 / (2 width^2))
Field gaussian_field(std::shared_ptr<const RadialGrid> g, double amplitude,
                     double width);

} // namespace spsolve
