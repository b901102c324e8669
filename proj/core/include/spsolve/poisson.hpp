#pragma once

#include "spsolve/field.hpp"
#include "spsolve/weights.hpp"

namespace spsolve {

//==============================================================================
//! Newtonian potential of rho u^2:  -Delta phi = rho u^2  with phi -> 0 at
//! infinity. Radially, spherical averaging of the kernel gives
//!
//!   phi(r) = (1/omega) int_0^inf rho(s) u(s)^2 |S^{N-1}| s^{N-1}
//!                               / max(r, s)^{N-2} ds,
//!
//! discretized on the quadrature nodes. Two cumulative passes (charge inside
//! r, kernel-weighted charge outside r) evaluate it in O(n); the far field
//! phi(r_max) = Q_total / (omega r_max^{N-2}) is matched by construction and
//! the kernel matrix is exactly symmetric in the w-weighted inner product,
//! so Coulomb energies pair exactly with their directional derivatives.
//! Charge beyond r_max is zero by the Dirichlet truncation.
Field solve_phi(const RadialGrid& grid, const WeightModel& rho, const Field& u);

// Dirichlet energy of phi_u beyond r_max, in closed form (the far field is
// pure Q/(omega r^{N-2}) because all charge sits inside the truncation).
double phi_grad_energy_tail(const RadialGrid& grid, const WeightModel& rho,
                            const Field& u);

// | int |phi'|^2 - int rho phi u^2 | / max(1, int |phi'|^2), with phi' taken
// by finite differences on the grid plus the closed-form exterior tail — an
// independent route through the identity int |grad phi_u|^2 = int rho phi u^2.
double phi_identity_residual(const RadialGrid& grid, const WeightModel& rho,
                             const Field& u, const Field& phi);

} // namespace spsolve
