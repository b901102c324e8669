#pragma once

#include "spsolve/fibering.hpp"
#include "spsolve/functionals.hpp"

#include <utility>

namespace spsolve {

struct SolveOptions {
  double grad_tol = 1e-8;
  double constraint_tol = 1e-10;
  std::size_t max_iters = 50000;
  double armijo_factor = 0.5;
  double initial_step = 1.0;
  // excited-state interface search resolution
  std::size_t interface_candidates = 14;
};

//==============================================================================
struct SolveReport {
  Field u;
  double level = 0.0;          // I_lambda(u) (I_{mu,lambda} during continuation)
  double grad_residual = 0.0;  // ||I'(u)||_{L2} / max(1, ||u||_{L2})
  double nehari_residual = 0.0;
  double pohozaev_residual = 0.0;
  std::optional<double> j_residual;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<std::pair<double, double>> c_mu_trace; // (mu, c_{mu,lambda})
  double alpha_proxy = 0.0;    // smallest observed int |u|^{q+1} along iterates
  double ps_witness_gap = 0.0; // max of (q-1)/2 A + (q-3)/4 l^2 C - (q+1) I
};

// Groundstate by projected, H1-preconditioned descent. Dispatch:
//   q > 3           : Nehari re-projection,
//   q = 3           : same, degenerate fibers (C <= B) reject and halve the step,
//   q in (2, 3)     : homogeneous rho, projection onto the J = 0 manifold via
//                     the fiber maximum.
// The final iterate is replaced by |u| and re-polished.
SolveReport solve_groundstate(const Params& p, const WeightModel& rho,
                              std::shared_ptr<const RadialGrid> grid,
                              const Field& init, const SolveOptions& opts = {});

// Solves along the mu ladder (each rung warm-started from the previous) and
// records the non-increasing trace of levels; the final report is at the last
// rung. Ladder must be increasing inside [1/2, 1]; q in (2, 3).
SolveReport continuation_mu(const Params& p, const std::vector<double>& mu_ladder,
                            const WeightModel& rho,
                            std::shared_ptr<const RadialGrid> grid,
                            const Field& init, const SolveOptions& opts = {});

// Upper estimate of the mountain-pass level: piecewise-linear path from 0 to
// endpoint (I(endpoint) < 0 required), all interior nodes relaxed downhill,
// path maximum tracked over nodes and segment subsamples.
double mountain_pass_estimate(const Params& p, const WeightModel& rho,
                              std::shared_ptr<const RadialGrid> grid,
                              const Field& endpoint, std::size_t n_path = 32,
                              std::size_t sweeps = 200,
                              const SolveOptions& opts = {});

// Scales u along t^2 u(t .) until the energy is negative; endpoint for the
// mountain-pass path class.
Field make_negative_endpoint(const Params& p, const WeightModel& rho,
                             const Field& seed);

// Least level among radial profiles with exactly m sign changes — a
// node-count proxy for the higher min-max levels; m = 0 is the groundstate.
// Interfaces are coarse-searched and refined; each annulus solves its own
// Nehari-projected subproblem in the frozen Coulomb potential of the other
// lobes (node nearest each interface pinned to zero), then the assembled
// profile is polished unconstrained. m >= 1 requires q >= 3.
SolveReport excited_state(const Params& p, const WeightModel& rho,
                          std::shared_ptr<const RadialGrid> grid,
                          std::size_t m, const SolveOptions& opts = {});

struct FlowReport {
  bool decayed = false;
  double final_h1 = 0.0;
  std::vector<double> trace; // ||u||_H1 per accepted step
  std::size_t iterations = 0;
  Field u; // final iterate
};

// L2 gradient flow u <- u - tau I'(u) (linear part implicit for stability),
// monotone in I by backtracking. decayed when ||u||_H1 < 1e-6.
FlowReport nonexistence_flow(const Params& p, const WeightModel& rho,
                             std::shared_ptr<const RadialGrid> grid,
                             const Field& init, const SolveOptions& opts = {});

} // namespace spsolve
