#include "spsolve/diagnostics.hpp"

#include "spsolve/detail/banded.hpp"
#include "spsolve/detail/h1_operator.hpp"
#include "spsolve/fibering.hpp"

#include <cmath>
#include <stdexcept>

namespace spsolve {

double sobolev_S3() { return 3.0 * std::pow(M_PI / 2.0, 4.0 / 3.0); }

double s_lambda_const(double q, double lambda, double mbar) {
  if (!(q >= 3.0) || !(q < 5.0))
    throw std::invalid_argument("s_lambda_const: q must lie in [3, 5)");
  if (!(lambda > 0.0) || !(mbar > 0.0))
    throw std::invalid_argument("s_lambda_const: lambda, Mbar must be positive");
  const double e1 = -3.0 / (q - 2.0);
  const double e2 = (5.0 - q) / (q - 2.0);
  return (q - 2.0) * std::pow(3.0 * (q + 1.0), e1) *
         std::pow(2.0 * (5.0 - q) / (lambda * mbar), e2);
}

double lambda1_threshold(double q, double mbar, double Cbar) {
  if (!(q >= 3.0) || !(q < 5.0))
    throw std::invalid_argument("lambda1_threshold: q must lie in [3, 5)");
  if (!(mbar > 0.0) || !(Cbar > 0.0))
    throw std::invalid_argument("lambda1_threshold: Mbar, Cbar must be positive");
  const double S = sobolev_S3();
  const double target = std::pow(S, 3) / (4.0 * std::pow(Cbar, 4));
  // S_lambda = K lambda^{-(5-q)/(q-2)} with K = S_lambda at lambda = 1.
  const double K = s_lambda_const(q, 1.0, mbar);
  const double e2 = (5.0 - q) / (q - 2.0);
  return std::pow(K / target, 1.0 / e2);
}

CbarResult cbar_pipeline(double q, const Params& p, const WeightModel& rho_vanishing,
                         const Field& v) {
  if (rho_vanishing.kind != WeightKind::vanishing_ball)
    throw std::invalid_argument("cbar_pipeline: rho must be of vanishing kind");
  const auto& g = *v.grid;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0.0 && eval_weight(rho_vanishing, g.r[i]) != 0.0)
      throw std::invalid_argument("cbar_pipeline: v must be supported in rho^{-1}(0)");

  double A = kinetic_quadratic(v), Pq = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    A += g.w[i] * v[i] * v[i];
    Pq += g.w[i] * std::pow(std::abs(v[i]), q + 1.0);
  }
  if (!(A > 0.0) || !(Pq > 0.0))
    throw std::invalid_argument("cbar_pipeline: v must be nontrivial");

  CbarResult out;
  // cbar = max_t (t^2/2) A - (t^{q+1}/(q+1)) Pq, that = (q-1)/(2(q+1)) A that^2
  // at that = (A/Pq)^{1/(q-1)}.
  out.cbar = (q - 1.0) / (2.0 * (q + 1.0)) *
             std::pow(A, (q + 1.0) / (q - 1.0)) / std::pow(Pq, 2.0 / (q - 1.0));

  const double om = omega_const(p.dim);
  const double h1_bound = 2.0 * (q + 1.0) * out.cbar / (q - 1.0);
  double coulomb_bound; // on lambda^2 int rho phi u^2
  if (q > 3.0) {
    coulomb_bound = 4.0 * (q + 1.0) * out.cbar / (q - 3.0);
  } else {
    // q = 3 route: Sobolev controls the L4 term, then the level identity.
    const double s4 = sobolev_best_constant(q, v.grid);
    const double l4_bound = std::pow(h1_bound, 2) / std::pow(s4, 4);
    coulomb_bound = 4.0 * (out.cbar + h1_bound + l4_bound);
  }
  out.Cbar = std::sqrt(h1_bound + std::sqrt(om * coulomb_bound));
  return out;
}

AprioriBounds apriori_bounds(double c, double k, double q, int dim) {
  const double den = 2.0 * (q - 2.0) + k * (q - 1.0);
  if (!(den > 0.0))
    throw std::invalid_argument(
        "apriori_bounds: need 2(q-2) + k(q-1) > 0, i.e. k > -2(q-2)/(q-1)");
  AprioriBounds b;
  b.delta_max = c * (6.0 - dim + 2.0 * k) * (q + 1.0) / den;
  b.gamma_max = 2.0 * c * (2.0 * (q + 1.0) - dim * (q - 1.0)) / den;
  b.alpha_of = b.delta_max - b.gamma_max;
  return b;
}

double kbar_threshold(int dim, double q) {
  if (!(q > 2.0))
    throw std::invalid_argument("kbar_threshold: q must exceed 2");
  const double v = std::max(dim / 4.0, 1.0 / (q - 1.0)) * (3.0 - q) - 1.0;
  return std::max(v, 0.0);
}

TailMass tail_mass(const Field& u, const WeightModel& rho, double R, double M,
                   double lambda) {
  const auto& g = *u.grid;
  if (!(R < g.r_max))
    throw std::invalid_argument("tail_mass: R must be below r_max");
  TailMass t;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (g.r[i] <= R)
      continue;
    const double val = g.w[i] * std::abs(u[i]) * u[i] * u[i]; // w |u|^3
    (eval_weight(rho, g.r[i]) >= M ? t.a_part : t.b_part) += val;
  }
  Params p;
  p.dim = g.dim;
  p.lambda = lambda;
  const double en = e_norm(u, p, rho);
  t.bound_a = std::pow(omega_const(g.dim), -0.5) * std::pow(en, 3) / (lambda * M);
  return t;
}

//==============================================================================
double sobolev_best_constant(double q, std::shared_ptr<const RadialGrid> grid) {
  const double p1 = q + 1.0;
  if (!(p1 > 2.0) || p1 > critical_exponent(grid->dim) + 1e-12)
    throw std::invalid_argument("sobolev_best_constant: q+1 must lie in (2, 2*]");
  const RadialGrid& g = *grid;
  const std::size_t n = g.size();

  // Minimize 1/2 ||u||_H1^2 on { ||u||_{q+1} = 1 } by normalized H1-
  // preconditioned descent; the minimizer realizes the best constant.
  detail::BandedSpd M = detail::assemble_h1_matrix(g, 1.0, 1.0);

  auto lq_norm = [&](const Field& u) { return norm(u, NormKind::Lp, p1); };
  auto h1_sq = [&](const Field& u) {
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      m += g.w[i] * u[i] * u[i];
    return kinetic_quadratic(u) + m;
  };

  Field u = gaussian_field(grid, 1.0, 1.0);
  {
    const double s = lq_norm(u);
    for (auto& x : u.v)
      x /= s;
  }
  double A = h1_sq(u);

  for (std::size_t it = 0; it < 4000; ++it) {
    // gradient of 1/2||u||_H1^2 - (A/p1) ||u||_{q+1}^{p1} at the constraint
    std::vector<double> kin;
    apply_stiffness(g, u.v, kin);
    Field grad(u.grid);
    for (std::size_t i = 0; i < n; ++i)
      grad[i] = kin[i] / g.w[i] + u[i] -
                A * std::pow(std::abs(u[i]), p1 - 2.0) * u[i];

    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i)
      rhs[i] = g.w[i] * grad[i];
    Field dir(u.grid);
    M.solve(rhs, dir.v);

    double gnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      gnorm += g.w[i] * grad[i] * grad[i];
    if (std::sqrt(gnorm) <= 1e-10 * std::max(1.0, A))
      break;

    double tau = 0.5;
    bool ok = false;
    for (int bt = 0; bt < 50; ++bt) {
      Field trial(u.grid);
      for (std::size_t i = 0; i < n; ++i)
        trial[i] = u[i] - tau * dir[i];
      const double s = lq_norm(trial);
      if (s > 0.0) {
        for (auto& x : trial.v)
          x /= s;
        const double At = h1_sq(trial);
        if (At < A) {
          u = std::move(trial);
          A = At;
          ok = true;
          break;
        }
      }
      tau *= 0.5;
    }
    if (!ok)
      break;
  }
  return std::sqrt(A); // ||u||_H1 with ||u||_{q+1} = 1
}

ConstantsReport constants_report(double q, double lambda, double mbar,
                                 const WeightModel& rho_vanishing, const Field& v) {
  Params p;
  p.dim = v.grid->dim;
  p.lambda = lambda;
  const auto cb = cbar_pipeline(q, p, rho_vanishing, v);
  ConstantsReport rep;
  rep.sobolev_S = sobolev_S3();
  rep.s_q1 = sobolev_best_constant(q, v.grid);
  rep.s_lambda = s_lambda_const(q, lambda, mbar);
  rep.lambda1 = lambda1_threshold(q, mbar, cb.Cbar);
  rep.cbar_level = cb.cbar;
  rep.Cbar = cb.Cbar;
  return rep;
}

CriticalAudit critical_nonexistence_audit(const Params& p, double k) {
  CriticalAudit a;
  const int N = p.dim;
  const double qc = critical_exponent(N) - 1.0;
  if (std::abs(p.q - qc) > 1e-9)
    throw std::invalid_argument("critical_nonexistence_audit: q must equal 2*-1");

  a.coef_grad = 0.5 * (N - 2.0) - double(N) / (p.q + 1.0); // = 0 at q = 2*-1
  a.coef_mass = 0.5 * N - 0.5 * (N - 2.0);                 // = 1
  a.coef_coulomb = (2.0 * k + 6.0 - N) / 4.0;

  if (k >= 0.5 * (N - 6.0) - 1e-12) {
    a.infeasible = true;
    a.explanation =
        "Nehari + Pohozaev combination: coefficient of int u^2 is 1 and the "
        "Coulomb coefficient (2k+6-N)/4 is nonnegative, forcing int u^2 <= 0; "
        "only (u, phi) = (0, 0) solves the system at q = 2*-1.";
  } else {
    a.infeasible = false;
    a.explanation = "hypothesis k >= (N-6)/2 fails: the combination has a "
                    "negative Coulomb coefficient and forces nothing.";
  }
  return a;
}

} // namespace spsolve
