#pragma once

#include "spsolve/field.hpp"
#include "spsolve/params.hpp"
#include "spsolve/poisson.hpp"
#include "spsolve/weights.hpp"

namespace spsolve {

//==============================================================================
//! The four integrals of the (perturbed) action
//!   I_{mu,lambda}(u) = 1/2 int (|grad u|^2 + u^2)
//!                    + (lambda^2/4) int rho phi_u u^2
//!                    - (mu/(q+1)) int |u|^{q+1},
//! mu = 1 recovers I_lambda. The Coulomb term is always evaluated through a
//! single Poisson solve (the double-integral identity makes the two routes
//! equal; phi is O(n)).
struct EnergyBreakdown {
  double kinetic = 0.0; // 1/2 int |u'|^2
  double mass = 0.0;    // 1/2 int u^2
  double coulomb = 0.0; // (lambda^2/4) int rho phi_u u^2
  double power = 0.0;   // (mu/(q+1)) int |u|^{q+1}
  double total = 0.0;   // kinetic + mass + coulomb - power
  double h1_norm = 0.0;
  double e_norm = 0.0;  // (h1^2 + lambda (omega int rho phi u^2)^{1/2})^{1/2}

  // Raw integrals (no prefactors), handy for the scalar functionals below.
  double int_grad2 = 0.0;   // int |u'|^2
  double int_u2 = 0.0;      // int u^2
  double int_rho_phi_u2 = 0.0;
  double int_power = 0.0;   // int |u|^{q+1}
};

EnergyBreakdown energy(const Field& u, const Params& p, const WeightModel& rho);

// Exact discrete L2 representation of I': for every v,
//   <gradient_field(u), v>_{L2} == d/de I(u + e v)|_{e=0}
// to machine precision (kinetic part via W^{-1} D^T W D, Coulomb part exact by
// kernel symmetry). Pointwise it is -Delta u + u + lambda^2 rho phi_u u
// - mu |u|^{q-1} u up to O(dr^2).
Field gradient_field(const Field& u, const Params& p, const WeightModel& rho);

// G_lambda(u) = I'(u)(u) = ||u||_H1^2 + lambda^2 int rho phi u^2 - mu int |u|^{q+1}.
double nehari_G(const Field& u, const Params& p, const WeightModel& rho);

// Scaling-derived necessary condition,
//   P(u) = (N-2)/2 A + N b/2 M + (N+2+2k) c/4 C - N d mu/(q+1) P,
// an identity when rho is homogeneous of degree k, an inequality (P <= 0)
// when k rho <= (x, grad rho). Returns P normalized by max(1, largest term).
// Throws if k is unset and rho has no homogeneity degree.
double pohozaev_residual(const Field& u, const Params& p, const WeightModel& rho);

// J_{lambda,nu}(u): the fiber-polynomial derivative at t = 1 for homogeneous
// rho; normalized like pohozaev_residual. Throws on inadmissible nu.
double j_functional(const Field& u, const Params& p, const WeightModel& rho);

// (int |grad u|^2)^{1/2} (int |grad phi_u|^2)^{1/2} - int rho |u|^3, never
// below -quadrature tolerance.
double coulomb_sobolev_gap(const Field& u, const WeightModel& rho);

// (||u||_H1^2 + lambda (omega int rho phi_u u^2)^{1/2})^{1/2}.
double e_norm(const Field& u, const Params& p, const WeightModel& rho);

} // namespace spsolve
