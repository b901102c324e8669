#include "spsolve/functionals.hpp"

#include <cmath>
#include <stdexcept>

namespace spsolve {

namespace {

void check_exponent(const Params& p) {
  if (!(p.q > 1.0) || p.q > critical_exponent(p.dim) - 1.0 + 1e-12)
    throw std::invalid_argument("q must lie in (1, 2*-1]");
}

// |u|^{q-1} u, continuously extended by 0 at u = 0.
inline double signed_power(double u, double q) {
  if (u == 0.0)
    return 0.0;
  return std::pow(std::abs(u), q - 1.0) * u;
}

double normalize(double value, double scale) {
  return value / std::max(1.0, scale);
}

} // namespace

EnergyBreakdown energy(const Field& u, const Params& p, const WeightModel& rho) {
  check_exponent(p);
  const auto& g = *u.grid;
  const std::size_t n = u.size();

  Field phi = solve_phi(g, rho, u);

  EnergyBreakdown e;
  e.int_grad2 = kinetic_quadratic(u);
  for (std::size_t i = 0; i < n; ++i) {
    e.int_u2 += g.w[i] * u[i] * u[i];
    e.int_rho_phi_u2 += g.w[i] * eval_weight(rho, g.r[i]) * phi[i] * u[i] * u[i];
    e.int_power += g.w[i] * std::pow(std::abs(u[i]), p.q + 1.0);
  }
  e.kinetic = 0.5 * e.int_grad2;
  e.mass = 0.5 * e.int_u2;
  e.coulomb = 0.25 * p.lambda * p.lambda * e.int_rho_phi_u2;
  e.power = p.mu / (p.q + 1.0) * e.int_power;
  e.total = e.kinetic + e.mass + e.coulomb - e.power;
  e.h1_norm = std::sqrt(e.int_grad2 + e.int_u2);
  const double om = omega_const(p.dim);
  e.e_norm = std::sqrt(e.int_grad2 + e.int_u2 +
                       p.lambda * std::sqrt(om * e.int_rho_phi_u2));
  return e;
}

Field gradient_field(const Field& u, const Params& p, const WeightModel& rho) {
  const auto& g = *u.grid;
  const std::size_t n = u.size();
  const double l2 = p.lambda * p.lambda;

  // Kinetic part: W^{-1} K u, the exact gradient of the staggered form.
  std::vector<double> acc;
  apply_stiffness(g, u.v, acc);

  Field phi = solve_phi(g, rho, u);
  Field grad(u.grid);
  for (std::size_t i = 0; i < n; ++i) {
    grad[i] = acc[i] / g.w[i] + u[i] +
              l2 * eval_weight(rho, g.r[i]) * phi[i] * u[i] -
              p.mu * signed_power(u[i], p.q);
  }
  return grad;
}

double nehari_G(const Field& u, const Params& p, const WeightModel& rho) {
  const auto e = energy(u, p, rho);
  return e.int_grad2 + e.int_u2 + p.lambda * p.lambda * e.int_rho_phi_u2 -
         p.mu * e.int_power;
}

double pohozaev_residual(const Field& u, const Params& p, const WeightModel& rho) {
  double k;
  if (p.k) {
    k = *p.k;
  } else if (auto deg = rho.homogeneity_degree()) {
    k = *deg;
  } else {
    throw std::invalid_argument(
        "pohozaev_residual: k required for non-homogeneous weight");
  }
  const auto e = energy(u, p, rho);
  const int N = p.dim;
  const double t_grad = 0.5 * (N - 2) * e.int_grad2;
  const double t_mass = 0.5 * N * p.b_eff() * e.int_u2;
  const double t_coul = 0.25 * (N + 2.0 + 2.0 * k) * p.c_eff() * e.int_rho_phi_u2;
  const double t_pow = N * p.d_eff() * p.mu / (p.q + 1.0) * e.int_power;
  const double P = t_grad + t_mass + t_coul - t_pow;
  const double scale = std::max({std::abs(t_grad), std::abs(t_mass),
                                 std::abs(t_coul), std::abs(t_pow)});
  return normalize(P, scale);
}

double j_functional(const Field& u, const Params& p, const WeightModel& rho) {
  const auto deg = rho.homogeneity_degree();
  const double kbar = p.kbar ? *p.kbar : (deg ? *deg : 0.0);
  if (!p.kbar && !deg)
    throw std::invalid_argument("j_functional: homogeneous weight (or kbar) required");
  const double nu = p.nu ? *p.nu : default_nu(p.dim, p.q, kbar);
  if (!nu_admissible(p.dim, p.q, nu, kbar))
    throw std::invalid_argument("j_functional: inadmissible nu for (dim, q, kbar)");

  const auto e = energy(u, p, rho);
  const int N = p.dim;
  const double t1 = 0.5 * (2.0 * nu + 2.0 - N) * e.int_grad2;
  const double t2 = 0.5 * (2.0 * nu - N) * e.int_u2;
  const double t3 = 0.25 * (4.0 * nu - N - 2.0 - 2.0 * kbar) * p.lambda *
                    p.lambda * e.int_rho_phi_u2;
  const double t4 = (nu * (p.q + 1.0) - N) / (p.q + 1.0) * p.mu * e.int_power;
  const double J = t1 + t2 + t3 - t4;
  const double scale =
      std::max({std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4)});
  return normalize(J, scale);
}

double coulomb_sobolev_gap(const Field& u, const WeightModel& rho) {
  const auto& g = *u.grid;
  Field phi = solve_phi(g, rho, u);
  Field dphi = radial_derivative(phi);
  const double a = kinetic_quadratic(u);
  double b = phi_grad_energy_tail(g, rho, u), c = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    b += g.w[i] * dphi[i] * dphi[i];
    c += g.w[i] * eval_weight(rho, g.r[i]) * std::abs(u[i]) * u[i] * u[i];
  }
  return std::sqrt(a) * std::sqrt(b) - c;
}

double e_norm(const Field& u, const Params& p, const WeightModel& rho) {
  if (p.lambda < 0.0)
    throw std::invalid_argument("e_norm: lambda must be nonnegative");
  return energy(u, p, rho).e_norm;
}

} // namespace spsolve
