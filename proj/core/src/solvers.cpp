#include "spsolve/solvers.hpp"

#include "spsolve/detail/banded.hpp"
#include "spsolve/detail/h1_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spsolve {

namespace {

constexpr double kArmijoC1 = 1e-4;
constexpr double kStepFloor = 1e-14;

double dot_w(const RadialGrid& g, const std::vector<double>& a,
             const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += g.w[i] * a[i] * b[i];
  return s;
}

//==============================================================================
// H1 Riesz preconditioner: d solves (W + K) d = W g with K the staggered
// stiffness, i.e. the descent direction is the H1 representative of the L2
// gradient. Tridiagonal SPD, factored once per grid.
class H1Precond {
public:
  explicit H1Precond(const RadialGrid& g, double mass_scale = 1.0,
                     double stiff_scale = 1.0)
      : g_(g), M_(detail::assemble_h1_matrix(g, mass_scale, stiff_scale)) {}

  Field apply(const Field& grad) const {
    std::vector<double> rhs(grad.size());
    for (std::size_t i = 0; i < rhs.size(); ++i)
      rhs[i] = g_.w[i] * grad[i];
    Field d(grad.grid);
    M_.solve(rhs, d.v);
    return d;
  }

  void solve_weighted(const std::vector<double>& rhs, std::vector<double>& x) const {
    M_.solve(rhs, x);
  }

private:
  const RadialGrid& g_;
  detail::BandedSpd M_;
};

//==============================================================================
enum class ConstraintPath { nehari, nehari_guarded, fiber };

struct Projected {
  Field field;
  double level; // I of the projected point; polynomial-exact on the fiber path
};

struct Projector {
  ConstraintPath path;
  const Params* p;
  const WeightModel* rho;
  double nu = 0.0;

  Projected operator()(Field u) const {
    if (path == ConstraintPath::fiber) {
      // The resampled field carries O(dr^2 |t-1|) quadrature mismatch; the
      // polynomial value is the exact energy of the scaled profile, so line
      // searches compare through it.
      const auto fp = fiber_coeffs(u, *p, *rho);
      const double t = fiber_argmax(fp);
      return {scale_field(u, t, nu), fp.eval(t)};
    }
    const double t = nehari_project(u, *p, *rho); // throws when no crossing
    Field scaled = t * u;
    const double level = energy(scaled, *p, *rho).total;
    return {std::move(scaled), level};
  }
};

ConstraintPath pick_path(const Params& p, const WeightModel& rho) {
  if (p.q > 3.0 + 1e-12)
    return ConstraintPath::nehari;
  if (std::abs(p.q - 3.0) <= 1e-12)
    return ConstraintPath::nehari_guarded;
  if (!rho.homogeneity_degree())
    throw std::invalid_argument(
        "solve_groundstate: q < 3 requires a homogeneous weight");
  return ConstraintPath::fiber;
}

struct DescentResult {
  Field u;
  EnergyBreakdown e;
  double grad_residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double alpha_proxy = std::numeric_limits<double>::infinity();
  double ps_witness_gap = -std::numeric_limits<double>::infinity();
};

// Projected preconditioned descent with Armijo 0.5 backtracking; accepted
// steps decrease the constrained energy (through the polynomial-exact level
// on the fiber path).
DescentResult descend(Field u0, const Params& p, const WeightModel& rho,
                      const Projector& project, const H1Precond& pre,
                      const SolveOptions& opts, std::size_t max_iters) {
  DescentResult res;

  Projected cur = project(std::move(u0));
  Field u = std::move(cur.field);
  const RadialGrid& g = *u.grid;
  EnergyBreakdown e = energy(u, p, rho);

  double tau = opts.initial_step;
  double prev_res = std::numeric_limits<double>::infinity();
  double best_res = std::numeric_limits<double>::infinity();
  std::size_t stagnant = 0;

  std::size_t it = 0;
  for (; it < max_iters; ++it) {
    Field grad = gradient_field(u, p, rho);
    const double gnorm = std::sqrt(dot_w(g, grad.v, grad.v));
    const double unorm = std::sqrt(dot_w(g, u.v, u.v));
    res.grad_residual = gnorm / std::max(1.0, unorm);
    res.alpha_proxy = std::min(res.alpha_proxy, e.int_power);
    res.ps_witness_gap = std::max(
        res.ps_witness_gap,
        0.5 * (p.q - 1.0) * (e.int_grad2 + e.int_u2) +
            0.25 * (p.q - 3.0) * p.lambda * p.lambda * e.int_rho_phi_u2 -
            (p.q + 1.0) * e.total);

    if (res.grad_residual <= opts.grad_tol) {
      res.converged = true;
      break;
    }
    // roundoff floor: no meaningful residual progress for a long stretch
    if (res.grad_residual < 0.999 * best_res) {
      best_res = res.grad_residual;
      stagnant = 0;
    } else if (++stagnant > 150) {
      break;
    }

    Field dir = pre.apply(grad);
    const double slope = dot_w(g, grad.v, dir.v); // > 0 for SPD preconditioner
    tau = std::min(2.0 * tau, opts.initial_step);

    auto make_trial = [&](double t) {
      Field trial(u.grid);
      for (std::size_t i = 0; i < u.size(); ++i)
        trial[i] = u[i] - t * dir[i];
      return trial;
    };

    bool accepted = false;

    // Once the predicted decrease falls below the resolution of the energy
    // sums, Armijo comparisons are pure roundoff; continue with unguarded
    // fixed-point steps (locally contractive) and shrink tau only when the
    // residual stops improving.
    const double resolvable = 512.0 * std::numeric_limits<double>::epsilon() *
                              std::max(1.0, std::abs(e.total));
    if (tau * slope <= resolvable) {
      try {
        Projected pt = project(make_trial(tau));
        if (res.grad_residual > 1.5 * prev_res)
          tau = std::max(0.5 * tau, kStepFloor);
        prev_res = std::min(prev_res, res.grad_residual);
        u = std::move(pt.field);
        e = energy(u, p, rho);
        accepted = true;
      } catch (const std::exception&) {
        accepted = false;
      }
    }

    while (!accepted && tau >= kStepFloor) {
      try {
        Projected pt = project(make_trial(tau));
        if (pt.level <= e.total - kArmijoC1 * tau * slope) {
          u = std::move(pt.field);
          e = energy(u, p, rho);
          accepted = true;
          break;
        }
      } catch (const std::exception&) {
        // degenerate fiber (no crossing): reject and shrink
      }
      tau *= opts.armijo_factor;
    }
    if (!accepted)
      break; // stalled below the step floor
  }

  res.u = std::move(u);
  res.e = e;
  res.iterations = it;
  return res;
}

// Gradient-norm polish: minimizes F(u) = 1/2 ||I'(u)||_{L2}^2 by preconditioned
// descent with central-difference Hessian-vector products. Discrete critical
// points are strict minima of F at value 0, and F is a sum of nonnegative
// terms, so comparisons never suffer the cancellation plateau. Finishes runs
// the constrained descent cannot: the q < 3 manifold minimum carries an
// O(dr^2) Lagrange multiplier, and Nehari-path line searches bottom out at
// the double-precision energy-comparison floor.
DescentResult saddle_polish(Field u, const Params& p, const WeightModel& rho,
                            const H1Precond& pre, const SolveOptions& opts,
                            std::size_t max_iters) {
  const RadialGrid& g = *u.grid;
  DescentResult res;
  res.alpha_proxy = std::numeric_limits<double>::infinity();
  res.ps_witness_gap = -std::numeric_limits<double>::infinity();

  auto grad_and_F = [&](const Field& x, Field& grad) {
    grad = gradient_field(x, p, rho);
    return 0.5 * dot_w(g, grad.v, grad.v);
  };

  Field grad(u.grid);
  double F = grad_and_F(u, grad);
  double tau = 1.0;

  // Polak-Ribiere+ nonlinear CG on F with the H1 preconditioner.
  Field gF_prev(u.grid), dir(u.grid);
  double gFMg_prev = 0.0;
  bool have_prev = false;

  std::size_t it = 0;
  for (; it < max_iters; ++it) {
    const double unorm = std::sqrt(dot_w(g, u.v, u.v));
    res.grad_residual = std::sqrt(2.0 * F) / std::max(1.0, unorm);
    if (res.grad_residual <= opts.grad_tol) {
      res.converged = true;
      break;
    }

    // grad F = Hess(u) . I'(u), by central differences along the gradient
    const double gnorm = std::sqrt(2.0 * F);
    const double eps = 1e-7 * std::max(1.0, unorm) / std::max(gnorm, 1e-300);
    Field up(u.grid), um(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) {
      up[i] = u[i] + eps * grad[i];
      um[i] = u[i] - eps * grad[i];
    }
    const Field gp = gradient_field(up, p, rho);
    const Field gm = gradient_field(um, p, rho);
    Field gF(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i)
      gF[i] = (gp[i] - gm[i]) / (2.0 * eps);

    Field pgF = pre.apply(gF);
    const double gFMg = dot_w(g, gF.v, pgF.v);
    double beta = 0.0;
    if (have_prev && gFMg_prev > 0.0) {
      double num = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i)
        num += g.w[i] * (gF[i] - gF_prev[i]) * pgF[i];
      beta = std::max(0.0, num / gFMg_prev);
    }
    for (std::size_t i = 0; i < u.size(); ++i)
      dir[i] = pgF[i] + (have_prev ? beta * dir[i] : 0.0);
    double slope = dot_w(g, gF.v, dir.v);
    if (!(slope > 0.0)) { // lost descent: restart with the plain direction
      dir = pgF;
      slope = gFMg;
      if (!(slope > 0.0))
        break;
    }
    gF_prev = gF;
    gFMg_prev = gFMg;
    have_prev = true;

    tau = std::min(4.0 * tau, 1.0);
    bool accepted = false;
    while (tau >= kStepFloor) {
      Field trial(u.grid);
      for (std::size_t i = 0; i < u.size(); ++i)
        trial[i] = u[i] - tau * dir[i];
      Field gt(u.grid);
      const double Ft = grad_and_F(trial, gt);
      if (Ft <= F - kArmijoC1 * tau * slope) {
        u = std::move(trial);
        grad = std::move(gt);
        F = Ft;
        accepted = true;
        break;
      }
      tau *= opts.armijo_factor;
    }
    if (!accepted) {
      if (!have_prev)
        break;
      have_prev = false; // retry once from a fresh steepest-descent direction
      tau = 1.0;
      continue;
    }
  }

  res.u = std::move(u);
  res.e = energy(res.u, p, rho);
  res.iterations = it;
  res.alpha_proxy = res.e.int_power;
  res.ps_witness_gap =
      0.5 * (p.q - 1.0) * (res.e.int_grad2 + res.e.int_u2) +
      0.25 * (p.q - 3.0) * p.lambda * p.lambda * res.e.int_rho_phi_u2 -
      (p.q + 1.0) * res.e.total;
  return res;
}

void fill_residuals(SolveReport& rep, const Params& p, const WeightModel& rho,
                    const DescentResult& d) {
  rep.u = d.u;
  rep.level = d.e.total;
  rep.grad_residual = d.grad_residual;
  rep.iterations = d.iterations;
  rep.converged = d.converged;
  rep.alpha_proxy = d.alpha_proxy;
  rep.ps_witness_gap = d.ps_witness_gap;

  const double G = nehari_G(d.u, p, rho);
  const double scale = std::max(
      {1.0, d.e.int_grad2 + d.e.int_u2,
       p.lambda * p.lambda * d.e.int_rho_phi_u2, p.mu * d.e.int_power});
  rep.nehari_residual = std::abs(G) / scale;

  if (rho.homogeneity_degree() || p.k)
    rep.pohozaev_residual = pohozaev_residual(d.u, p, rho);
  if (auto deg = rho.homogeneity_degree(); deg && p.q > 2.0) {
    Params pj = p;
    pj.kbar = *deg;
    if (!pj.nu)
      pj.nu = default_nu(p.dim, p.q, *deg);
    if (nu_admissible(p.dim, p.q, *pj.nu, *deg))
      rep.j_residual = j_functional(d.u, pj, rho);
  }
}

void validate_groundstate_params(const Params& p) {
  const double qc = critical_exponent(p.dim) - 1.0;
  if (!(p.q > 2.0) || !(p.q < qc - 1e-12))
    throw std::invalid_argument(
        "solve_groundstate: q must lie in (2, 2*-1); at q = 2*-1 the "
        "Nehari/Pohozaev combination forces the zero solution");
  if (!(p.mu >= 0.5 - 1e-12) || p.mu > 1.0 + 1e-12)
    throw std::invalid_argument("solve_groundstate: mu must lie in [1/2, 1]");
}

} // namespace

//==============================================================================
SolveReport solve_groundstate(const Params& p_in, const WeightModel& rho,
                              std::shared_ptr<const RadialGrid> grid,
                              const Field& init, const SolveOptions& opts) {
  validate_groundstate_params(p_in);
  if (norm(init, NormKind::Lp, 2.0) == 0.0)
    throw std::invalid_argument("solve_groundstate: zero initial field "
                                "(projection undefined at 0)");

  Params p = p_in;
  const ConstraintPath path = pick_path(p, rho);
  Projector project{path, &p, &rho, 0.0};
  if (path == ConstraintPath::fiber) {
    const double kbar = *rho.homogeneity_degree();
    p.kbar = kbar;
    if (!p.nu)
      p.nu = default_nu(p.dim, p.q, kbar);
    if (!nu_admissible(p.dim, p.q, *p.nu, kbar))
      throw std::invalid_argument("solve_groundstate: inadmissible (q, kbar, nu)");
    project.nu = *p.nu;
  }

  H1Precond pre(*grid);
  DescentResult d = descend(init, p, rho, project, pre, opts, opts.max_iters);

  // Positivity polish: restart from |u| and descend the remaining budget.
  Field abs_u(d.u.grid);
  for (std::size_t i = 0; i < d.u.size(); ++i)
    abs_u[i] = std::abs(d.u[i]);
  const std::size_t used = d.iterations;
  DescentResult polished =
      descend(std::move(abs_u), p, rho, project, pre, opts,
              std::max<std::size_t>(opts.max_iters > used ? opts.max_iters - used : 0, 64));
  polished.iterations += used;

  // Constrained descent bottoms out at either the energy-comparison roundoff
  // plateau or (q < 3) the O(dr^2) multiplier of the discrete manifold; the
  // ||I'||^2 polish is cancellation-free and finishes the job from there.
  if (!polished.converged && polished.grad_residual < 5e-2) {
    DescentResult deep = saddle_polish(std::move(polished.u), p, rho, pre, opts,
                                       std::min<std::size_t>(opts.max_iters, 20000));
    deep.iterations += polished.iterations;
    polished = std::move(deep);
  }
  polished.alpha_proxy = std::min(polished.alpha_proxy, d.alpha_proxy);
  polished.ps_witness_gap = std::max(polished.ps_witness_gap, d.ps_witness_gap);

  SolveReport rep;
  fill_residuals(rep, p, rho, polished);
  return rep;
}

//==============================================================================
SolveReport continuation_mu(const Params& p_in, const std::vector<double>& ladder,
                            const WeightModel& rho,
                            std::shared_ptr<const RadialGrid> grid,
                            const Field& init, const SolveOptions& opts) {
  if (ladder.empty())
    throw std::invalid_argument("continuation_mu: empty mu ladder");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 0.5 - 1e-12 || ladder[i] > 1.0 + 1e-12 ||
        (i > 0 && ladder[i] <= ladder[i - 1]))
      throw std::invalid_argument("continuation_mu: ladder must increase within [1/2, 1]");
  }
  if (!(p_in.q > 2.0) || !(p_in.q < 3.0))
    throw std::invalid_argument("continuation_mu: q must lie in (2, 3)");

  SolveReport rep;
  std::vector<std::pair<double, double>> trace;
  Field warm = init;
  for (double mu : ladder) {
    Params p = p_in;
    p.mu = mu;
    rep = solve_groundstate(p, rho, grid, warm, opts);
    if (!rep.converged)
      throw std::runtime_error("continuation_mu: rung mu = " + std::to_string(mu) +
                               " failed to converge");
    trace.emplace_back(mu, rep.level);
    warm = rep.u;
  }
  rep.c_mu_trace = std::move(trace);
  return rep;
}

//==============================================================================
Field make_negative_endpoint(const Params& p, const WeightModel& rho,
                             const Field& seed) {
  if (norm(seed, NormKind::Lp, 2.0) == 0.0)
    throw std::invalid_argument("make_negative_endpoint: zero seed");
  // v_t = t^2 u(t x): the power term grows like t^{2q+2-N}, dominant for q > 2.
  double t = 1.0;
  for (int k = 0; k < 64; ++k) {
    Field v = scale_field(seed, t, 2.0);
    if (energy(v, p, rho).total < 0.0)
      return v;
    t *= 1.5;
  }
  throw std::runtime_error("make_negative_endpoint: energy never went negative");
}

double mountain_pass_estimate(const Params& p, const WeightModel& rho,
                              std::shared_ptr<const RadialGrid> grid,
                              const Field& endpoint, std::size_t n_path,
                              std::size_t sweeps, const SolveOptions& opts) {
  const double end_level = energy(endpoint, p, rho).total;
  if (!(end_level < 0.0))
    throw std::invalid_argument("mountain_pass_estimate: endpoint energy must be negative");

  const RadialGrid& g = *grid;
  H1Precond pre(g);

  // Piecewise-linear path 0 -> endpoint in field space.
  std::vector<Field> path;
  path.reserve(n_path + 2);
  for (std::size_t k = 0; k <= n_path + 1; ++k)
    path.push_back(double(k) / double(n_path + 1) * endpoint);

  std::vector<double> tau(path.size(), opts.initial_step);
  const double floor_level = -2.0 * std::abs(end_level);

  // True maximum over the polyline: per segment, coarse scan for a bracket
  // then golden-section refinement of s -> I((1-s) P_k + s P_{k+1}).
  auto segment_max = [&](const Field& a, const Field& b) {
    auto at = [&](double s) {
      Field blend(a.grid);
      for (std::size_t i = 0; i < blend.size(); ++i)
        blend[i] = (1.0 - s) * a[i] + s * b[i];
      return energy(blend, p, rho).total;
    };
    double best_s = 0.0, best = at(0.0);
    for (int j = 1; j <= 12; ++j) {
      const double s = j / 12.0;
      const double v = at(s);
      if (v > best) {
        best = v;
        best_s = s;
      }
    }
    double lo = std::max(0.0, best_s - 1.0 / 12.0);
    double hi = std::min(1.0, best_s + 1.0 / 12.0);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = at(x1), f2 = at(x2);
    for (int j = 0; j < 40; ++j) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = at(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = at(x1);
      }
    }
    return std::max(best, std::max(f1, f2));
  };

  auto path_max = [&]() {
    double itmax = end_level;
    for (std::size_t k = 0; k + 1 < path.size(); ++k)
      itmax = std::max(itmax, segment_max(path[k], path[k + 1]));
    return itmax;
  };

  // Even arc-length redistribution keeps nodes from sliding off the ridge
  // into the valleys and leaving the crossing under-resolved.
  auto redistribute = [&]() {
    const std::size_t m = path.size();
    std::vector<double> s(m, 0.0);
    for (std::size_t k = 1; k < m; ++k) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < path[k].size(); ++i) {
        const double d = path[k][i] - path[k - 1][i];
        d2 += g.w[i] * d * d;
      }
      s[k] = s[k - 1] + std::sqrt(d2);
    }
    if (!(s.back() > 0.0))
      return;
    std::vector<Field> fresh;
    fresh.reserve(m);
    fresh.push_back(path.front());
    for (std::size_t k = 1; k + 1 < m; ++k) {
      const double target = s.back() * double(k) / double(m - 1);
      std::size_t j = 1;
      while (j + 1 < m && s[j] < target)
        ++j;
      const double span = s[j] - s[j - 1];
      const double a = span > 0.0 ? (target - s[j - 1]) / span : 0.0;
      Field blend(path[0].grid);
      for (std::size_t i = 0; i < blend.size(); ++i)
        blend[i] = (1.0 - a) * path[j - 1][i] + a * path[j][i];
      fresh.push_back(std::move(blend));
    }
    fresh.push_back(path.back());
    path = std::move(fresh);
  };

  for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t k = 1; k <= n_path; ++k) {
      EnergyBreakdown e = energy(path[k], p, rho);
      if (e.total < floor_level)
        continue; // already deep in the negative valley
      Field grad = gradient_field(path[k], p, rho);
      Field dir = pre.apply(grad);
      const double slope = dot_w(g, grad.v, dir.v);
      double t = std::min(2.0 * tau[k], opts.initial_step);
      while (t >= kStepFloor) {
        Field trial(path[k].grid);
        for (std::size_t i = 0; i < trial.size(); ++i)
          trial[i] = path[k][i] - t * dir[i];
        if (energy(trial, p, rho).total <= e.total - kArmijoC1 * t * slope) {
          path[k] = std::move(trial);
          break;
        }
        t *= opts.armijo_factor;
      }
      tau[k] = std::max(t, kStepFloor);
    }
    redistribute();
  }
  return path_max();
}

//==============================================================================
namespace {

// Sum of w_i a_i b_i.
double wdot(const RadialGrid& g, const std::vector<double>& a,
            const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += g.w[i] * a[i] * b[i];
  return s;
}

int count_sign_changes(const Field& u) {
  int changes = 0;
  double last = 0.0;
  const double floor_amp = 1e-6 * norm(u, NormKind::Lp, 2.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (std::abs(u[i]) <= floor_amp)
      continue;
    if (last != 0.0 && u[i] * last < 0.0)
      ++changes;
    last = u[i];
  }
  return changes;
}

// Groundstate of one annulus in a frozen external Coulomb potential:
// minimize 1/2 (||v'||^2 + ||v||^2 + <Vext v, v>) + (l^2/4) int rho phi_v v^2
// - (mu/(q+1)) int |v|^{q+1} over fields supported on [first, last] with a per
// -piece Nehari projection ((A + E) t^2 + B t^4 = C t^{q+1}, unique crossing
// for q >= 3). Pinned interface nodes stay zero, so kinetic energies of the
// annuli add exactly.
Field annulus_groundstate(const Params& p, const WeightModel& rho,
                          std::shared_ptr<const RadialGrid> grid,
                          const std::vector<double>& v_ext, std::size_t first,
                          std::size_t last, Field v, const H1Precond& pre,
                          std::size_t iters, double tol) {
  const RadialGrid& g = *grid;
  const std::size_t n = g.size();
  const double l2 = p.lambda * p.lambda;

  auto mask = [&](Field& f) {
    for (std::size_t i = 0; i < n; ++i)
      if (i < first || i > last)
        f[i] = 0.0;
  };

  struct Ints {
    double AE, B, C; // H1+external, Coulomb, mu-power
  };
  auto integrals = [&](const Field& f) {
    Field phi = solve_phi(g, rho, f);
    Ints s{kinetic_quadratic(f), 0.0, 0.0};
    for (std::size_t i = first; i <= last; ++i) {
      s.AE += g.w[i] * (1.0 + v_ext[i]) * f[i] * f[i];
      s.B += l2 * g.w[i] * eval_weight(rho, g.r[i]) * phi[i] * f[i] * f[i];
      s.C += p.mu * g.w[i] * std::pow(std::abs(f[i]), p.q + 1.0);
    }
    return s;
  };
  auto project = [&](Field f) {
    mask(f);
    const Ints s = integrals(f);
    if (!(s.C > 0.0) || !(s.AE > 0.0))
      throw std::runtime_error("annulus_groundstate: dead lobe");
    double t;
    if (s.B <= 1e-300) {
      t = std::pow(s.AE / s.C, 1.0 / (p.q - 1.0));
    } else if (std::abs(p.q - 3.0) <= 1e-12) {
      if (s.C <= s.B)
        throw std::runtime_error("annulus_groundstate: no Nehari crossing");
      t = std::sqrt(s.AE / (s.C - s.B));
    } else {
      auto lhs = [&](double tt) {
        return s.AE * std::pow(tt, 1.0 - p.q) + s.B * std::pow(tt, 3.0 - p.q);
      };
      double lo = 1.0, hi = 1.0;
      while (lhs(lo) < s.C)
        lo *= 0.5;
      while (lhs(hi) > s.C)
        hi *= 2.0;
      for (int j = 0; j < 120 && (hi - lo) > 1e-12 * hi; ++j) {
        const double mid = 0.5 * (lo + hi);
        (lhs(mid) > s.C ? lo : hi) = mid;
      }
      t = 0.5 * (lo + hi);
    }
    for (auto& x : f.v)
      x *= t;
    const double lvl = 0.5 * t * t * s.AE + 0.25 * std::pow(t, 4) * s.B -
                       std::pow(t, p.q + 1.0) * s.C / (p.q + 1.0);
    return std::pair<Field, double>(std::move(f), lvl);
  };
  auto grad_of = [&](const Field& f) {
    std::vector<double> kin;
    apply_stiffness(g, f.v, kin);
    Field phi = solve_phi(g, rho, f);
    Field gr(grid);
    for (std::size_t i = first; i <= last; ++i) {
      const double pw =
          f[i] == 0.0 ? 0.0 : std::pow(std::abs(f[i]), p.q - 1.0) * f[i];
      gr[i] = kin[i] / g.w[i] + (1.0 + v_ext[i]) * f[i] +
              l2 * eval_weight(rho, g.r[i]) * phi[i] * f[i] - p.mu * pw;
    }
    return gr;
  };

  auto [u, level] = project(std::move(v));
  double tau = 1.0;
  for (std::size_t it = 0; it < iters; ++it) {
    Field gr = grad_of(u);
    const double gnorm = std::sqrt(wdot(g, gr.v, gr.v));
    if (gnorm <= tol * std::max(1.0, std::sqrt(wdot(g, u.v, u.v))))
      break;
    Field dir = pre.apply(gr);
    mask(dir);
    const double slope = wdot(g, gr.v, dir.v);
    if (!(slope > 0.0))
      break;
    tau = std::min(2.0 * tau, 1.0);
    bool accepted = false;
    while (tau >= 1e-14) {
      Field trial(grid);
      for (std::size_t i = 0; i < n; ++i)
        trial[i] = u[i] - tau * dir[i];
      try {
        auto [pt, lvl] = project(std::move(trial));
        if (lvl <= level - 1e-4 * tau * slope) {
          u = std::move(pt);
          level = lvl;
          accepted = true;
          break;
        }
      } catch (const std::exception&) {
      }
      tau *= 0.5;
    }
    if (!accepted)
      break;
  }
  return u;
}

} // namespace

SolveReport excited_state(const Params& p, const WeightModel& rho,
                          std::shared_ptr<const RadialGrid> grid,
                          std::size_t m, const SolveOptions& opts) {
  if (m == 0)
    return solve_groundstate(p, rho, grid, gaussian_field(grid, 1.0, 1.0), opts);
  validate_groundstate_params(p);
  if (!(p.q >= 3.0))
    throw std::invalid_argument("excited_state: m >= 1 requires q >= 3 "
                                "(per-annulus Nehari scalings)");
  if (m > 4)
    throw std::invalid_argument("excited_state: m <= 4 supported");

  const RadialGrid& g = *grid;
  const std::size_t n = g.size();
  H1Precond pre(g);
  const double l2 = p.lambda * p.lambda;

  // One candidate = interface node indices; annulus a spans the open index
  // range between pinned nodes, carrying sign (-1)^a. Pieces are solved
  // self-consistently in each other's frozen Coulomb potential.
  struct Candidate {
    double level = std::numeric_limits<double>::infinity();
    Field u;
    std::vector<std::size_t> pins;
  };

  auto solve_candidate = [&](std::vector<std::size_t> pins,
                             bool thorough) -> std::optional<Candidate> {
    for (std::size_t a = 1; a < pins.size(); ++a)
      if (pins[a] <= pins[a - 1] + 4)
        return std::nullopt;
    if (pins.front() < 4 || pins.back() + 4 >= n)
      return std::nullopt;

    const std::size_t parts = m + 1;
    std::vector<std::size_t> firsts(parts), lasts(parts);
    for (std::size_t a = 0; a < parts; ++a) {
      firsts[a] = (a == 0) ? 0 : pins[a - 1] + 1;
      lasts[a] = (a == m) ? n - 1 : pins[a] - 1;
    }

    // Narrow positive bump seeds per annulus, hugging the inner edge (signs
    // live only in the assembly). Wide lobes at large r carry enormous
    // Coulomb self-energy and start the sub-solves absurdly high.
    std::vector<Field> piece;
    for (std::size_t a = 0; a < parts; ++a) {
      const double rl = (a == 0) ? 0.0 : g.r[pins[a - 1]];
      const double rr = (a == m) ? g.r_max : g.r[pins[a]];
      const double span = rr - rl;
      const double wdt = std::clamp(0.22 * span, 0.12, 0.5);
      const double c = (a == m) ? rl + std::min(1.5 * wdt + 0.2, 0.5 * span)
                                : 0.5 * (rl + rr);
      Field f = Field::from_function(grid, [&](double r) {
        return std::exp(-0.5 * (r - c) * (r - c) / (wdt * wdt));
      });
      for (std::size_t i = 0; i < n; ++i)
        if (i < firsts[a] || i > lasts[a])
          f[i] = 0.0;
      piece.push_back(std::move(f));
    }

    try {
      const std::size_t sub_iters =
          std::min<std::size_t>(opts.max_iters, thorough ? 400 : 250);
      const int rounds = thorough ? 7 : 4;
      // damped potential mixing against self-consistency sloshing
      const double mix = 0.55;
      std::vector<Field> phis(parts, Field(grid));
      bool have_phis = false;
      for (int round = 0; round < rounds; ++round) {
        const double tol = (thorough && round + 1 == rounds) ? 1e-8 : 1e-4;
        for (std::size_t a = 0; a < parts; ++a) {
          Field fresh = solve_phi(g, rho, piece[a]);
          if (!have_phis) {
            phis[a] = std::move(fresh);
          } else {
            for (std::size_t i = 0; i < n; ++i)
              phis[a][i] = (1.0 - mix) * phis[a][i] + mix * fresh[i];
          }
        }
        have_phis = true;
        for (std::size_t a = 0; a < parts; ++a) {
          std::vector<double> v_ext(n, 0.0);
          for (std::size_t i = 0; i < n; ++i) {
            double phi_others = 0.0;
            for (std::size_t b = 0; b < parts; ++b)
              if (b != a)
                phi_others += phis[b][i];
            v_ext[i] = l2 * eval_weight(rho, g.r[i]) * phi_others;
          }
          piece[a] = annulus_groundstate(p, rho, grid, v_ext, firsts[a],
                                         lasts[a], piece[a], pre, sub_iters, tol);
        }
      }
      Candidate cand;
      cand.pins = std::move(pins);
      cand.u = Field(grid);
      for (std::size_t a = 0; a < parts; ++a) {
        const double sign = (a % 2 == 0) ? 1.0 : -1.0;
        for (std::size_t i = 0; i < n; ++i)
          cand.u[i] += sign * piece[a][i];
      }
      cand.level = energy(cand.u, p, rho).total;
      return cand;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };

  auto index_of_radius = [&](double r) {
    std::size_t i = 0;
    while (i + 1 < n && g.r[i] < r)
      ++i;
    return i;
  };

  // coarse interface scan, then index-level refinement around the best
  const double lo = 0.08 * g.r_max, hi = 0.7 * g.r_max;
  const std::size_t nc = opts.interface_candidates;
  std::vector<std::vector<std::size_t>> candidates;
  if (m == 1) {
    for (std::size_t i = 0; i < nc; ++i)
      candidates.push_back({index_of_radius(lo + (hi - lo) * double(i) / double(nc - 1))});
  } else {
    const std::size_t nper = std::max<std::size_t>(5, nc / 2);
    for (std::size_t i = 0; i < nper; ++i)
      for (std::size_t j = i + 1; j < nper; ++j) {
        std::vector<std::size_t> c;
        for (std::size_t a = 0; a < m; ++a) {
          const double x0 = lo + (hi - lo) * double(i) / double(nper - 1);
          const double x1 = lo + (hi - lo) * double(j) / double(nper - 1);
          c.push_back(index_of_radius(
              x0 + (x1 - x0) * double(a) / double(std::max<std::size_t>(m - 1, 1))));
        }
        candidates.push_back(std::move(c));
      }
  }

  std::vector<Candidate> scanned;
  for (auto& cand : candidates)
    if (auto r = solve_candidate(cand, false))
      scanned.push_back(std::move(*r));
  if (scanned.empty())
    throw std::runtime_error("excited_state: no feasible node pattern on this grid");
  std::sort(scanned.begin(), scanned.end(),
            [](const Candidate& a, const Candidate& b) { return a.level < b.level; });

  std::optional<Candidate> best;
  for (std::size_t k = 0; k < std::min<std::size_t>(3, scanned.size()); ++k)
    if (auto r = solve_candidate(scanned[k].pins, true))
      if (!best || r->level < best->level)
        best = std::move(r);
  if (!best)
    best = std::move(scanned.front());

  long span = long(n / nc) + 1;
  for (int round = 0; round < 3 && span > 0; ++round) {
    for (std::size_t a = 0; a < m; ++a) {
      for (long shift : {-span, -span / 2, span / 2, span}) {
        if (shift == 0)
          continue;
        auto pins = best->pins;
        const long fresh = long(pins[a]) + shift;
        if (fresh < 4 || fresh + 4 >= long(n))
          continue;
        pins[a] = std::size_t(fresh);
        auto r = solve_candidate(pins, false);
        if (r && r->level < best->level)
          best = std::move(r);
      }
    }
    span = span / 3;
  }
  if (auto r = solve_candidate(best->pins, true); r)
    best = std::move(r);

  // The pinned minimizer at the optimal interfaces approximates a genuine
  // sign-changing critical point; release the pins and polish ||I'||^2, keep
  // the outcome only if the node pattern and level survive.
  DescentResult final_run;
  final_run.u = best->u;
  final_run.e = energy(best->u, p, rho);
  final_run.iterations = 0;
  {
    Field gr = gradient_field(best->u, p, rho);
    final_run.grad_residual = std::sqrt(wdot(g, gr.v, gr.v)) /
                              std::max(1.0, std::sqrt(wdot(g, best->u.v, best->u.v)));
  }
  {
    DescentResult deep = saddle_polish(best->u, p, rho, pre, opts,
                                       std::min<std::size_t>(opts.max_iters, 4000));
    const bool same_level =
        std::abs(deep.e.total - best->level) <= 0.02 * std::abs(best->level);
    if (same_level && count_sign_changes(deep.u) == int(m))
      final_run = std::move(deep);
  }

  SolveReport rep;
  fill_residuals(rep, p, rho, final_run);
  return rep;
}

//==============================================================================
FlowReport nonexistence_flow(const Params& p, const WeightModel& rho,
                             std::shared_ptr<const RadialGrid> grid,
                             const Field& init, const SolveOptions& opts) {
  const RadialGrid& g = *grid;
  const std::size_t n = g.size();
  const double l2 = p.lambda * p.lambda;

  FlowReport rep;
  Field u = init;
  double tau = opts.initial_step;

  // Semi-implicit Euler on u' = -I'(u): (1 + tau) W + tau D^T W D implicit,
  // Coulomb and power terms explicit. Unconditionally stable in the linear part.
  std::optional<H1Precond> step;
  step.emplace(g, 1.0 + tau, tau);

  EnergyBreakdown e = energy(u, p, rho);
  rep.trace.push_back(e.h1_norm);

  std::size_t accepted_run = 0;
  std::size_t it = 0;
  for (; it < opts.max_iters; ++it) {
    const double h1 = norm(u, NormKind::H1);
    if (h1 < 1e-6) {
      rep.decayed = true;
      break;
    }
    if (!std::isfinite(h1) || h1 > 1e6)
      break; // grew past the mountain: no decay

    Field phi = solve_phi(g, rho, u);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double nl = p.mu * (u[i] == 0.0 ? 0.0
                                            : std::pow(std::abs(u[i]), p.q - 1.0) * u[i]) -
                        l2 * eval_weight(rho, g.r[i]) * phi[i] * u[i];
      rhs[i] = g.w[i] * (u[i] + tau * nl);
    }
    Field next(u.grid);
    step->solve_weighted(rhs, next.v);

    const EnergyBreakdown en = energy(next, p, rho);
    const bool decreased =
        std::isfinite(en.total) &&
        en.total <= e.total + 1e-14 * std::max(1.0, std::abs(e.total));
    if (!decreased) {
      // monotone-energy safeguard; shrink the step and refactor
      tau *= 0.5;
      if (tau < 1e-12)
        throw std::runtime_error("nonexistence_flow: step-size collapse");
      step.emplace(g, 1.0 + tau, tau);
      accepted_run = 0;
      continue;
    }
    u = std::move(next);
    e = en;
    rep.trace.push_back(e.h1_norm);
    // regrow the step once the transient that forced the shrink has passed
    if (++accepted_run >= 25 && tau < opts.initial_step) {
      tau = std::min(2.0 * tau, opts.initial_step);
      step.emplace(g, 1.0 + tau, tau);
      accepted_run = 0;
    }
  }
  rep.iterations = it;
  rep.final_h1 = norm(u, NormKind::H1);
  rep.decayed = rep.decayed || rep.final_h1 < 1e-6;
  rep.u = std::move(u);
  return rep;
}

} // namespace spsolve
