#include "spsolve/fibering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spsolve {

double FiberPolynomial::eval(double t) const {
  return a * std::pow(t, exponents[0]) + b * std::pow(t, exponents[1]) +
         c * std::pow(t, exponents[2]) - d * std::pow(t, exponents[3]);
}

double FiberPolynomial::derivative(double t) const {
  return a * exponents[0] * std::pow(t, exponents[0] - 1.0) +
         b * exponents[1] * std::pow(t, exponents[1] - 1.0) +
         c * exponents[2] * std::pow(t, exponents[2] - 1.0) -
         d * exponents[3] * std::pow(t, exponents[3] - 1.0);
}

//==============================================================================
namespace {

// Local cubic (4-point Lagrange) through grid samples; even reflection below
// the first node, zero beyond r_max.
double interp_cubic(const RadialGrid& g, const std::vector<double>& v, double x) {
  const std::size_t n = g.size();
  if (x > g.r_max)
    return 0.0;
  if (x < 0.0)
    x = -x;

  // Virtual even extension: nodes (-r[1], -r[0], r[0], r[1], ...).
  auto node_r = [&](long j) { return j >= 0 ? g.r[j] : -g.r[-j - 1]; };
  auto node_v = [&](long j) { return j >= 0 ? v[j] : v[-j - 1]; };

  // First grid index with r >= x.
  long hi = std::lower_bound(g.r.begin(), g.r.end(), x) - g.r.begin();
  long j0 = hi - 2; // stencil {j0, j0+1, j0+2, j0+3}
  j0 = std::max(j0, -2L);
  j0 = std::min(j0, long(n) - 4);

  double out = 0.0;
  for (long a = 0; a < 4; ++a) {
    const long ja = j0 + a;
    double L = 1.0;
    for (long bq = 0; bq < 4; ++bq) {
      if (bq == a)
        continue;
      const long jb = j0 + bq;
      L *= (x - node_r(jb)) / (node_r(ja) - node_r(jb));
    }
    out += L * node_v(ja);
  }
  return out;
}

} // namespace

Field scale_field(const Field& u, double t, double nu) {
  if (!(t > 0.0))
    throw std::invalid_argument("scale_field: t must be positive");
  if (t == 1.0)
    return u;
  const auto& g = *u.grid;
  const double amp = std::pow(t, nu);
  Field out(u.grid);
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] = amp * interp_cubic(g, u.v, t * g.r[i]);
  return out;
}

FiberPolynomial fiber_coeffs(const Field& u, const Params& p,
                             const WeightModel& rho) {
  const auto deg = rho.homogeneity_degree();
  if (!deg)
    throw std::invalid_argument("fiber_coeffs: weight must be homogeneous");
  const double kbar = *deg;
  const double nu = p.nu ? *p.nu : default_nu(p.dim, p.q, kbar);
  if (!nu_admissible(p.dim, p.q, nu, kbar))
    throw std::invalid_argument("fiber_coeffs: inadmissible nu for (dim, q, kbar)");

  const auto e = energy(u, p, rho);
  FiberPolynomial fp;
  fp.a = 0.5 * e.int_grad2;
  fp.b = 0.5 * e.int_u2;
  fp.c = 0.25 * p.lambda * p.lambda * e.int_rho_phi_u2;
  fp.d = p.mu / (p.q + 1.0) * e.int_power;
  const int N = p.dim;
  fp.exponents = {2.0 * nu + 2.0 - N, 2.0 * nu - N,
                  4.0 * nu - N - 2.0 - 2.0 * kbar, nu * (p.q + 1.0) - N};
  if (!(fp.a > 0.0) || !(fp.b > 0.0) || !(fp.d > 0.0))
    throw std::invalid_argument("fiber_coeffs: degenerate field (a, b, d must be positive)");
  return fp;
}

double fiber_argmax(const FiberPolynomial& fp) {
  if (!(fp.a > 0.0) || !(fp.b > 0.0) || !(fp.d > 0.0) || fp.c < 0.0)
    throw std::invalid_argument("fiber_argmax: need a, b, d > 0 and c >= 0");
  const double p = fp.exponents[3];
  for (double e : {fp.exponents[0], fp.exponents[1], fp.exponents[2]})
    if (!(e > 0.0) || !(e < p))
      throw std::invalid_argument("fiber_argmax: dominant exponent not dominant");

  // In s = t^p:  f(s) = a s^{p0/p} + b s^{p1/p} + c s^{p2/p} - s d-scaled;
  // df/ds is strictly decreasing from +inf to -d, so the root is unique.
  auto dfds = [&](double s) {
    double acc = -fp.d;
    const double coef[3] = {fp.a, fp.b, fp.c};
    for (int i = 0; i < 3; ++i) {
      const double e = fp.exponents[i] / p;
      acc += coef[i] * e * std::pow(s, e - 1.0);
    }
    return acc;
  };

  double lo = 1.0, hi = 1.0;
  while (dfds(lo) < 0.0)
    lo *= 0.5;
  while (dfds(hi) > 0.0)
    hi *= 2.0;

  // Bisection with a guarded Newton polish.
  for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (dfds(mid) > 0.0 ? lo : hi) = mid;
  }
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 8; ++it) {
    double d1 = dfds(s), d2 = 0.0;
    const double coef[3] = {fp.a, fp.b, fp.c};
    for (int i = 0; i < 3; ++i) {
      const double e = fp.exponents[i] / p;
      d2 += coef[i] * e * (e - 1.0) * std::pow(s, e - 2.0);
    }
    const double step = d1 / d2;
    const double next = s - step;
    if (!(next > lo) || !(next < hi))
      break;
    s = next;
    if (std::abs(step) <= 1e-14 * s)
      break;
  }
  return std::pow(s, 1.0 / p);
}

double nehari_project(const Field& u, const Params& p, const WeightModel& rho) {
  const auto e = energy(u, p, rho);
  const double A = e.int_grad2 + e.int_u2;
  const double B = p.lambda * p.lambda * e.int_rho_phi_u2;
  const double C = p.mu * e.int_power;
  if (!(A > 0.0) || !(C > 0.0))
    throw std::invalid_argument("nehari_project: u must be nontrivial");

  if (B <= 1e-300) // lambda = 0 route: beta(u) closed form, any q > 1
    return std::pow(A / C, 1.0 / (p.q - 1.0));

  if (!(p.q >= 3.0))
    throw std::invalid_argument("nehari_project: q >= 3 required when lambda > 0");

  if (p.q == 3.0) {
    if (C <= B)
      throw std::runtime_error("nehari_project: no Nehari crossing (C <= B) at q = 3");
    return std::sqrt(A / (C - B));
  }

  // q > 3: A t^{1-q} + B t^{3-q} = C has a unique root (LHS strictly decreasing).
  auto lhs = [&](double t) {
    return A * std::pow(t, 1.0 - p.q) + B * std::pow(t, 3.0 - p.q);
  };
  double lo = 1.0, hi = 1.0;
  while (lhs(lo) < C)
    lo *= 0.5;
  while (lhs(hi) > C)
    hi *= 2.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lhs(mid) > C ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace spsolve
