#include <doctest.h>

#include <stdexcept>

#include "spsolve/poisson.hpp"

#include <cmath>
#include <random>

using namespace spsolve;

TEST_SUITE_BEGIN("poisson");

namespace {

// unit-ball indicator sampled with the half-value convention on the boundary
// node (the grid is chosen so that r = 1 is a node)
Field ball_indicator(std::shared_ptr<const RadialGrid> grid) {
  Field u(grid);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = grid->r[i];
    u[i] = r < 1.0 ? 1.0 : (r == 1.0 ? std::sqrt(0.5) : 0.0);
  }
  return u;
}

} // namespace

TEST_CASE("zero source gives zero potential") {
  auto grid = std::make_shared<const RadialGrid>(make_grid(3, 5.0, 128));
  Field z(grid);
  Field phi = solve_phi(*grid, WeightModel::make_constant(1.0), z);
  for (std::size_t i = 0; i < phi.size(); ++i)
    CHECK(phi[i] == 0.0);
  CHECK(phi_identity_residual(*grid, WeightModel::make_constant(1.0), z, phi) == 0.0);
}

TEST_CASE("uniform ball potential, N = 3") {
  auto grid = std::make_shared<const RadialGrid>(make_grid(3, 4.0, 4096));
  Field u = ball_indicator(grid);
  Field phi = solve_phi(*grid, WeightModel::make_constant(1.0), u);
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = grid->r[i];
    const double exact = r <= 1.0 ? (3.0 - r * r) / 6.0 : 1.0 / (3.0 * r);
    worst = std::max(worst, std::abs(phi[i] - exact) / exact);
  }
  CHECK(worst < 1e-6);
  CHECK(phi_identity_residual(*grid, WeightModel::make_constant(1.0), u, phi) < 1e-6);
}

TEST_CASE("scaling: phi is quadratic in the field amplitude") {
  auto grid = std::make_shared<const RadialGrid>(make_grid(3, 8.0, 512));
  std::mt19937 rng(12);
  Field u = random_smooth_field(grid, rng);
  const auto rho = WeightModel::make_homogeneous(1.0);
  Field phi1 = solve_phi(*grid, rho, u);
  Field phi2 = solve_phi(*grid, rho, 3.0 * u);
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK(phi2[i] == doctest::Approx(9.0 * phi1[i]).epsilon(1e-13));
}

TEST_CASE("nonnegative and nonincreasing for nonnegative sources") {
  auto grid = std::make_shared<const RadialGrid>(make_grid(3, 8.0, 512));
  std::mt19937 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    Field u = random_smooth_field(grid, rng);
    Field phi = solve_phi(*grid, WeightModel::make_homogeneous(2.0), u);
    for (std::size_t i = 0; i < phi.size(); ++i) {
      CHECK(phi[i] >= 0.0);
      if (i > 0)
        CHECK(phi[i] <= phi[i - 1] * (1.0 + 1e-14));
    }
  }
}

TEST_CASE("energy identity on random bumps across weights") {
  auto grid = std::make_shared<const RadialGrid>(make_grid(3, 12.0, 4096));
  std::mt19937 rng(007);
  const WeightModel rhos[] = {WeightModel::make_constant(1.0),
                              WeightModel::make_homogeneous(1.0),
                              WeightModel::make_homogeneous(2.0),
                              WeightModel::make_vanishing_ball(1.0, 2.0, 1.0)};
  for (int trial = 0; trial < 8; ++trial) {
    Field u = random_smooth_field(grid, rng);
    for (const auto& rho : rhos) {
      Field phi = solve_phi(*grid, rho, u);
      CHECK(phi_identity_residual(*grid, rho, u, phi) < 1e-6);
    }
  }
}

TEST_CASE("far field matches the total charge") {
  auto grid = std::make_shared<const RadialGrid>(make_grid(4, 6.0, 1024));
  Field u = gaussian_field(grid, 1.0, 0.8);
  const auto rho = WeightModel::make_constant(2.0);
  Field phi = solve_phi(*grid, rho, u);
  double Q = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    Q += grid->w[i] * 2.0 * u[i] * u[i];
  const double expected = Q / (omega_const(4) * std::pow(6.0, 2));
  CHECK(phi[phi.size() - 1] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_SUITE_END();
