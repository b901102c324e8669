#include "spsolve/poisson.hpp"

#include <cmath>
#include <stdexcept>

namespace spsolve {

Field solve_phi(const RadialGrid& grid, const WeightModel& rho, const Field& u) {
  const std::size_t n = grid.size();
  if (u.size() != n)
    throw std::invalid_argument("solve_phi: field/grid mismatch");
  const double om = omega_const(grid.dim);
  const int m = grid.dim - 2;

  // Quadrature-weighted charge w_i rho_i u_i^2.
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rho_i = eval_weight(rho, grid.r[i]);
    if (rho_i < 0.0)
      throw std::invalid_argument("solve_phi: negative weight sample");
    q[i] = grid.w[i] * rho_i * u[i] * u[i];
  }

  // inner[i] = sum_{j<=i} q_j,  outer[i] = sum_{j>i} q_j / r_j^{N-2}.
  std::vector<double> inner(n), outer(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += q[i];
    inner[i] = acc;
  }
  acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    outer[i] = acc;
    acc += q[i] / std::pow(grid.r[i], m);
  }

  Field phi(u.grid);
  for (std::size_t i = 0; i < n; ++i)
    phi[i] = (inner[i] / std::pow(grid.r[i], m) + outer[i]) / om;
  return phi;
}

double phi_grad_energy_tail(const RadialGrid& grid, const WeightModel& rho,
                            const Field& u) {
  // Beyond r_max the potential is exactly Q/(omega r^{N-2}), so the exterior
  // Dirichlet energy integrates in closed form to Q^2/(omega r_max^{N-2}).
  double Q = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    Q += grid.w[i] * eval_weight(rho, grid.r[i]) * u[i] * u[i];
  return Q * Q / (omega_const(grid.dim) * std::pow(grid.r_max, grid.dim - 2));
}

double phi_identity_residual(const RadialGrid& grid, const WeightModel& rho,
                             const Field& u, const Field& phi) {
  Field dphi = radial_derivative(phi);
  double lhs = phi_grad_energy_tail(grid, rho, u), rhs = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    lhs += grid.w[i] * dphi[i] * dphi[i];
    rhs += grid.w[i] * eval_weight(rho, grid.r[i]) * phi[i] * u[i] * u[i];
  }
  return std::abs(lhs - rhs) / std::max(1.0, lhs);
}

} // namespace spsolve
