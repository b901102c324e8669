#include <doctest.h>

#include <stdexcept>

#include "spsolve/functionals.hpp"

#include <cmath>
#include <random>

using namespace spsolve;

TEST_SUITE_BEGIN("functionals");

namespace {

std::shared_ptr<const RadialGrid> grid_3d(std::size_t n = 1024, double rmax = 10.0) {
  return std::make_shared<const RadialGrid>(make_grid(3, rmax, n));
}

double pair_w(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a.grid->w[i] * a[i] * b[i];
  return s;
}

} // namespace

TEST_CASE("zero field: all components vanish") {
  auto grid = grid_3d(256);
  Params p;
  p.q = 4.0;
  Field z(grid);
  const auto e = energy(z, p, WeightModel::make_constant(1.0));
  CHECK(e.kinetic == 0.0);
  CHECK(e.mass == 0.0);
  CHECK(e.coulomb == 0.0);
  CHECK(e.power == 0.0);
  CHECK(e.total == 0.0);
  CHECK(nehari_G(z, p, WeightModel::make_constant(1.0)) == 0.0);
}

TEST_CASE("mu monotonicity and component signs") {
  auto grid = grid_3d(512);
  std::mt19937 rng(2);
  Field u = random_smooth_field(grid, rng);
  const auto rho = WeightModel::make_homogeneous(1.0);
  Params p1;
  p1.q = 2.5;
  p1.mu = 1.0;
  Params ph = p1;
  ph.mu = 0.5;
  const auto e1 = energy(u, p1, rho);
  const auto eh = energy(u, ph, rho);
  CHECK(e1.total <= eh.total);
  CHECK(e1.kinetic >= 0.0);
  CHECK(e1.mass >= 0.0);
  CHECK(e1.coulomb >= 0.0);
  CHECK(e1.power >= 0.0);
  CHECK(e1.total ==
        doctest::Approx(e1.kinetic + e1.mass + e1.coulomb - e1.power).epsilon(1e-15));
}

TEST_CASE("energy is even in u") {
  auto grid = grid_3d(512);
  std::mt19937 rng(9);
  Field u = random_smooth_field(grid, rng);
  Params p;
  p.q = 3.5;
  const auto rho = WeightModel::make_homogeneous(2.0);
  const auto ep = energy(u, p, rho);
  const auto em = energy(-1.0 * u, p, rho);
  CHECK(ep.total == doctest::Approx(em.total).epsilon(1e-14));
  CHECK(ep.e_norm == doctest::Approx(em.e_norm).epsilon(1e-14));
}

TEST_CASE("q out of range rejected") {
  auto grid = grid_3d(128);
  Field u = gaussian_field(grid, 1.0, 1.0);
  Params p;
  p.q = 5.5; // above 2*-1 = 5 for N = 3
  CHECK_THROWS_AS(energy(u, p, WeightModel::make_constant(1.0)),
                  std::invalid_argument);
  p.q = 1.0;
  CHECK_THROWS_AS(energy(u, p, WeightModel::make_constant(1.0)),
                  std::invalid_argument);
}

TEST_CASE("gradient pairs exactly with directional derivatives") {
  auto grid = grid_3d(512);
  std::mt19937 rng(4);
  Params p;
  p.q = 3.5;
  p.lambda = 1.0;
  const auto rho = WeightModel::make_homogeneous(1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Field u = random_smooth_field(grid, rng);
    Field v = random_smooth_field(grid, rng);
    Field g = gradient_field(u, p, rho);
    const double pairing = pair_w(g, v);
    double prev = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double eps = 2e-3 / std::pow(2.0, k);
      const double ip = energy(u + eps * v, p, rho).total;
      const double im = energy(u - eps * v, p, rho).total;
      const double err = std::abs((ip - im) / (2.0 * eps) - pairing);
      if (k > 0)
        CHECK(prev / err > 3.5); // second-order convergence in eps
      prev = err;
    }
  }
}

TEST_CASE("zero gradient at zero, G matches <grad, u>") {
  auto grid = grid_3d(512);
  Params p;
  p.q = 4.0;
  const auto rho = WeightModel::make_homogeneous(2.0);
  Field z(grid);
  Field gz = gradient_field(z, p, rho);
  for (std::size_t i = 0; i < gz.size(); ++i)
    CHECK(gz[i] == 0.0);

  std::mt19937 rng(6);
  Field u = random_smooth_field(grid, rng);
  const double G = nehari_G(u, p, rho);
  const double via_grad = pair_w(gradient_field(u, p, rho), u);
  CHECK(G == doctest::Approx(via_grad).epsilon(1e-12));
}

TEST_CASE("nehari fiber closed form at lambda = 0, q = 3") {
  auto grid = grid_3d(1024);
  Params p;
  p.q = 3.0;
  p.lambda = 0.0;
  const auto rho = WeightModel::make_constant(1.0);
  Field u = gaussian_field(grid, 1.3, 0.9);
  const auto e = energy(u, p, rho);
  const double A = e.int_grad2 + e.int_u2, C = e.int_power;
  const double tstar = std::sqrt(A / C);
  // G(t u) = t^2 A - t^4 C vanishes at t* = sqrt(A/C)
  CHECK(nehari_G(tstar * u, p, rho) ==
        doctest::Approx(0.0).scale(A).epsilon(1e-12));
}

TEST_CASE("pohozaev sanity: critical-exponent coefficients force zero mass") {
  // N = 6 is outside the solver's range, but the coefficient arithmetic of
  // the combination is dimension-generic: at q = 2*-1, the gradient
  // coefficient (N-2)/2 - N/(q+1) vanishes.
  for (int N : {3, 4, 5}) {
    const double q = critical_exponent(N) - 1.0;
    CHECK(0.5 * (N - 2.0) - N / (q + 1.0) == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("pohozaev inequality direction for coercive weights") {
  // k rho <= (x, grad rho) holds with k = power for pure power laws; the
  // residual at a converged solution is checked in the solver tests. Here:
  // missing k for a non-homogeneous weight must throw.
  auto grid = grid_3d(128);
  Field u = gaussian_field(grid, 1.0, 1.0);
  Params p;
  p.q = 3.5;
  CHECK_THROWS_AS(pohozaev_residual(u, p, WeightModel::make_vanishing_ball(1.0, 2.0)),
                  std::invalid_argument);
  // homogeneous weight needs no explicit k
  CHECK_NOTHROW(pohozaev_residual(u, p, WeightModel::make_homogeneous(1.0)));
}

TEST_CASE("j functional differentiates the fiber polynomial at t = 1") {
  auto grid = grid_3d(2048, 12.0);
  std::mt19937 rng(8);
  Field u = random_smooth_field(grid, rng);
  Params p;
  p.q = 2.5;
  p.lambda = 1.0;
  p.kbar = 1.0;
  const auto rho = WeightModel::make_homogeneous(1.0);
  p.nu = default_nu(3, p.q, 1.0);

  const auto e = energy(u, p, rho);
  const int N = 3;
  const double nu = *p.nu;
  auto fiber_level = [&](double t) {
    return 0.5 * std::pow(t, 2 * nu + 2 - N) * e.int_grad2 +
           0.5 * std::pow(t, 2 * nu - N) * e.int_u2 +
           0.25 * std::pow(t, 4 * nu - N - 2 - 2.0) * e.int_rho_phi_u2 -
           p.mu / (p.q + 1.0) * std::pow(t, nu * (p.q + 1.0) - N) * e.int_power;
  };
  const double eps = 1e-5;
  const double fd = (fiber_level(1.0 + eps) - fiber_level(1.0 - eps)) / (2.0 * eps);
  const double scale = std::max({0.5 * (2 * nu + 2 - N) * e.int_grad2,
                                 0.5 * (2 * nu - N) * e.int_u2,
                                 0.25 * (4 * nu - N - 4) * e.int_rho_phi_u2,
                                 (nu * (p.q + 1) - N) / (p.q + 1) * e.int_power});
  const double J = j_functional(u, p, rho) * std::max(1.0, scale);
  CHECK(J == doctest::Approx(fd).epsilon(1e-7));

  Params bad = p;
  bad.nu = 1.0; // below max{N/2, 2/(q-1)}
  CHECK_THROWS_AS(j_functional(u, bad, rho), std::invalid_argument);
}

TEST_CASE("coulomb-sobolev gap is nonnegative on random fields") {
  auto grid = grid_3d(1024);
  std::mt19937 rng(10);
  const auto rho = WeightModel::make_homogeneous(2.0);
  for (int trial = 0; trial < 30; ++trial) {
    Field u = random_smooth_field(grid, rng);
    CHECK(coulomb_sobolev_gap(u, rho) > -1e-8);
  }
  Field z(grid);
  CHECK(coulomb_sobolev_gap(z, rho) == 0.0);
}

TEST_CASE("e-norm conventions") {
  auto grid = grid_3d(512);
  std::mt19937 rng(11);
  Field u = random_smooth_field(grid, rng);
  const auto rho = WeightModel::make_homogeneous(1.0);

  Params p0;
  p0.q = 3.0;
  p0.lambda = 0.0;
  const auto e0 = energy(u, p0, rho);
  CHECK(e_norm(u, p0, rho) == doctest::Approx(e0.h1_norm).epsilon(1e-14));

  Params p1 = p0;
  p1.lambda = 2.0;
  const auto e1 = energy(u, p1, rho);
  const double expected = std::sqrt(
      e1.h1_norm * e1.h1_norm +
      p1.lambda * std::sqrt(omega_const(3) * e1.int_rho_phi_u2));
  CHECK(e_norm(u, p1, rho) == doctest::Approx(expected).epsilon(1e-14));

  // concavity split: ||u||_E <= a + b with a = ||u||_H1, b^2 the Coulomb part
  const double a = e1.h1_norm;
  const double b = std::pow(p1.lambda * p1.lambda * omega_const(3) *
                                e1.int_rho_phi_u2,
                            0.25);
  CHECK(e_norm(u, p1, rho) <= a + b + 1e-12);
}

TEST_SUITE_END();
