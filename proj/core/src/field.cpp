#include "spsolve/field.hpp"

#include <cmath>
#include <stdexcept>

namespace spsolve {

Field::Field(std::shared_ptr<const RadialGrid> g, std::vector<double> values)
    : grid(std::move(g)), v(std::move(values)) {
  if (v.size() != grid->size())
    throw std::invalid_argument("Field: value/grid length mismatch");
}

Field Field::from_function(std::shared_ptr<const RadialGrid> g,
                           const std::function<double(double)>& f) {
  Field u(g);
  for (std::size_t i = 0; i < u.size(); ++i)
    u.v[i] = f(g->r[i]);
  return u;
}

Field operator*(double c, const Field& u) {
  Field out = u;
  for (auto& x : out.v)
    x *= c;
  return out;
}

Field operator+(const Field& a, const Field& b) {
  Field out = a;
  for (std::size_t i = 0; i < out.size(); ++i)
    out.v[i] += b.v[i];
  return out;
}

Field operator-(const Field& a, const Field& b) {
  Field out = a;
  for (std::size_t i = 0; i < out.size(); ++i)
    out.v[i] -= b.v[i];
  return out;
}

//==============================================================================
// 3-point first-derivative stencil at x1 of (x0, x1, x2), exact for quadratics.
namespace {
struct Stencil3 {
  double c0, c1, c2;
};

Stencil3 d1_interior(double h1, double h2) {
  return {-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2),
          h1 / (h2 * (h1 + h2))};
}

Stencil3 d1_left(double h1, double h2) {
  return {-(2.0 * h1 + h2) / (h1 * (h1 + h2)), (h1 + h2) / (h1 * h2),
          -h1 / (h2 * (h1 + h2))};
}

Stencil3 d1_right(double h1, double h2) {
  return {h2 / (h1 * (h1 + h2)), -(h1 + h2) / (h1 * h2),
          (h1 + 2.0 * h2) / (h2 * (h1 + h2))};
}
} // namespace

Field radial_derivative(const Field& u) {
  const std::size_t n = u.size();
  if (n < 3)
    throw std::invalid_argument("radial_derivative: need at least 3 nodes");
  const auto& r = u.grid->r;
  Field y(u.grid);

  {
    const auto s = d1_left(r[1] - r[0], r[2] - r[1]);
    y[0] = s.c0 * u[0] + s.c1 * u[1] + s.c2 * u[2];
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const auto s = d1_interior(r[i] - r[i - 1], r[i + 1] - r[i]);
    y[i] = s.c0 * u[i - 1] + s.c1 * u[i] + s.c2 * u[i + 1];
  }
  {
    const auto s = d1_right(r[n - 2] - r[n - 3], r[n - 1] - r[n - 2]);
    y[n - 1] = s.c0 * u[n - 3] + s.c1 * u[n - 2] + s.c2 * u[n - 1];
  }
  return y;
}

double kinetic_quadratic(const Field& u) {
  std::vector<double> scratch;
  const std::vector<double>* s = &u.grid->stiff;
  if (s->empty()) {
    scratch = stiffness_coeffs(*u.grid);
    s = &scratch;
  }
  const std::size_t n = u.size();
  double acc = 0.0;
  for (std::size_t c = 0; c + 1 < n; ++c) {
    const double d = u[c + 1] - u[c];
    acc += (*s)[c] * d * d;
  }
  acc += (*s)[n - 1] * u[n - 1] * u[n - 1];
  return acc;
}

void apply_stiffness(const RadialGrid& g, const std::vector<double>& u,
                     std::vector<double>& out) {
  std::vector<double> scratch;
  const std::vector<double>* s = &g.stiff;
  if (s->empty()) {
    scratch = stiffness_coeffs(g);
    s = &scratch;
  }
  const std::size_t n = u.size();
  out.assign(n, 0.0);
  for (std::size_t c = 0; c + 1 < n; ++c) {
    const double flux = (*s)[c] * (u[c + 1] - u[c]);
    out[c] -= flux;
    out[c + 1] += flux;
  }
  out[n - 1] += (*s)[n - 1] * u[n - 1];
}

Field radial_laplacian(const Field& u, int dim) {
  const std::size_t n = u.size();
  if (n < 3)
    throw std::invalid_argument("radial_laplacian: need at least 3 nodes");
  const auto& r = u.grid->r;
  Field out(u.grid);

  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = r[i] - r[i - 1], h2 = r[i + 1] - r[i];
    const double d2 = 2.0 * (h2 * u[i - 1] - (h1 + h2) * u[i] + h1 * u[i + 1]) /
                      (h1 * h2 * (h1 + h2));
    const auto s = d1_interior(h1, h2);
    const double d1 = s.c0 * u[i - 1] + s.c1 * u[i] + s.c2 * u[i + 1];
    out[i] = d2 + (dim - 1) / r[i] * d1;
  }

  // First node: even reflection across r = 0 supplies the missing neighbour
  // (-r[0], value u[0]); exact for even quadratics.
  {
    const double h1 = 2.0 * r[0], h2 = r[1] - r[0];
    const double d2 = 2.0 * (h2 * u[0] - (h1 + h2) * u[0] + h1 * u[1]) /
                      (h1 * h2 * (h1 + h2));
    const double d1 = h1 * (u[1] - u[0]) / (h2 * (h1 + h2));
    out[0] = d2 + (dim - 1) / r[0] * d1;
  }

  // Last node: one-sided stencils.
  {
    const double h1 = r[n - 2] - r[n - 3], h2 = r[n - 1] - r[n - 2];
    const double d2 = 2.0 * (h2 * u[n - 3] - (h1 + h2) * u[n - 2] + h1 * u[n - 1]) /
                      (h1 * h2 * (h1 + h2));
    const auto s = d1_right(h1, h2);
    const double d1 = s.c0 * u[n - 3] + s.c1 * u[n - 2] + s.c2 * u[n - 1];
    out[n - 1] = d2 + (dim - 1) / r[n - 1] * d1;
  }
  return out;
}

double norm(const Field& u, NormKind kind, double p) {
  const auto& g = *u.grid;
  switch (kind) {
  case NormKind::D12: {
    Field du = radial_derivative(u);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      s += g.w[i] * du[i] * du[i];
    return std::sqrt(s);
  }
  case NormKind::H1: {
    Field du = radial_derivative(u);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      s += g.w[i] * (du[i] * du[i] + u[i] * u[i]);
    return std::sqrt(s);
  }
  case NormKind::Lp: {
    if (!(p >= 1.0))
      throw std::invalid_argument("norm: Lp needs p >= 1");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      s += g.w[i] * std::pow(std::abs(u[i]), p);
    return std::pow(s, 1.0 / p);
  }
  }
  return 0.0;
}

Field random_smooth_field(std::shared_ptr<const RadialGrid> g, std::mt19937& rng) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_real_distribution<double> ctr(0.0, 0.55 * g->r_max);
  std::uniform_real_distribution<double> wid(0.6, 1.6);
  double a[3], c[3], s[3];
  for (int k = 0; k < 3; ++k) {
    a[k] = amp(rng);
    c[k] = ctr(rng);
    s[k] = wid(rng);
  }
  return Field::from_function(std::move(g), [&](double r) {
    double val = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double z = (r - c[k]) / s[k];
      val += a[k] * std::exp(-0.5 * z * z);
    }
    return val;
  });
}

Field gaussian_field(std::shared_ptr<const RadialGrid> g, double amplitude,
                     double width) {
  return Field::from_function(std::move(g), [=](double r) {
    return amplitude * std::exp(-0.5 * r * r / (width * width));
  });
}

} // namespace spsolve
