#include "spsolve/radial_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace spsolve {

double sphere_area(int dim) {
  const double pi = M_PI;
  switch (dim) {
  case 3: return 4.0 * pi;
  case 4: return 2.0 * pi * pi;
  case 5: return 8.0 * pi * pi / 3.0;
  default: throw std::invalid_argument("sphere_area: dim must be 3, 4 or 5");
  }
}

double omega_const(int dim) { return (dim - 2) * sphere_area(dim); }

double critical_exponent(int dim) {
  if (dim <= 2)
    throw std::invalid_argument("critical_exponent: dim must be >= 3");
  return 2.0 * dim / (dim - 2.0);
}

double RadialGrid::dr_min() const {
  double h = r[0];
  for (std::size_t i = 1; i < r.size(); ++i)
    h = std::min(h, r[i] - r[i - 1]);
  return h;
}

RadialGrid make_grid(int dim, double r_max, std::size_t n, Spacing spacing) {
  if (dim < 3 || dim > 5)
    throw std::invalid_argument("make_grid: dim must be 3, 4 or 5");
  if (!(r_max > 0.0))
    throw std::invalid_argument("make_grid: r_max must be positive");
  if (n < 16)
    throw std::invalid_argument("make_grid: need n >= 16");

  RadialGrid g;
  g.dim = dim;
  g.r_max = r_max;
  g.r.resize(n);
  g.w.assign(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const double x = double(i + 1) / double(n);
    g.r[i] = (spacing == Spacing::uniform) ? r_max * x : r_max * x * x;
  }

  const double area = sphere_area(dim);
  const int m = dim - 1;

  // Trapezoid over [r0, r_max], nonuniform-safe.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = g.r[i + 1] - g.r[i];
    g.w[i] += 0.5 * h * area * std::pow(g.r[i], m);
    g.w[i + 1] += 0.5 * h * area * std::pow(g.r[i + 1], m);
  }
  // [0, r0] cell: integrand frozen at r0, r^{N-1} integrated exactly.
  g.w[0] += area * std::pow(g.r[0], dim) / dim;

  g.stiff = stiffness_coeffs(g);
  return g;
}

std::vector<double> stiffness_coeffs(const RadialGrid& g) {
  if (!g.stiff.empty())
    return g.stiff;
  const std::size_t n = g.size();
  const double area = sphere_area(g.dim);
  std::vector<double> s(n);
  for (std::size_t c = 0; c + 1 < n; ++c) {
    const double h = g.r[c + 1] - g.r[c];
    const double vol =
        area * (std::pow(g.r[c + 1], g.dim) - std::pow(g.r[c], g.dim)) / g.dim;
    s[c] = vol / (h * h);
  }
  // ghost Dirichlet cell beyond r_max, one last-spacing wide
  const double hg = g.r[n - 1] - g.r[n - 2];
  const double volg =
      area * (std::pow(g.r_max + hg, g.dim) - std::pow(g.r_max, g.dim)) / g.dim;
  s[n - 1] = volg / (hg * hg);
  return s;
}

double integrate(const RadialGrid& grid, const std::vector<double>& samples) {
  if (samples.size() != grid.size())
    throw std::invalid_argument("integrate: sample/grid length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i)
    s += grid.w[i] * samples[i];
  return s;
}

} // namespace spsolve
