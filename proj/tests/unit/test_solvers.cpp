#include <doctest.h>

#include <stdexcept>

#include "oracles.hpp"
#include "spsolve/diagnostics.hpp"
#include "spsolve/solvers.hpp"

#include <cmath>
#include <random>

using namespace spsolve;

TEST_SUITE_BEGIN("solvers");

namespace {
std::shared_ptr<const RadialGrid> grid_3d(std::size_t n, double rmax) {
  return std::make_shared<const RadialGrid>(make_grid(3, rmax, n));
}
} // namespace

TEST_CASE("groundstate q = 4, coercive homogeneous weight") {
  Params p;
  p.q = 4.0;
  p.lambda = 1.0;
  auto rho = WeightModel::make_homogeneous(2.0);
  auto grid = grid_3d(1024, 9.0);
  auto rep = solve_groundstate(p, rho, grid, gaussian_field(grid, 1.0, 1.0));

  CHECK(rep.converged);
  CHECK(rep.grad_residual <= 1e-8);
  CHECK(rep.level > 0.0);
  CHECK(rep.nehari_residual < 1e-10);
  CHECK(std::abs(rep.pohozaev_residual) < 1e-3);
  for (std::size_t i = 0; i < rep.u.size(); ++i)
    CHECK(rep.u[i] > 0.0);
  // PS-boundedness witness is just -G on the constraint set
  CHECK(rep.ps_witness_gap < 1e-6);
  CHECK(rep.alpha_proxy > 0.0);

  // Nehari lower bound against the grid best constant
  const double s = sobolev_best_constant(p.q, grid);
  const auto e = energy(rep.u, p, rho);
  CHECK(e.h1_norm >= std::pow(s, (p.q + 1.0) / (p.q - 1.0)) - 1e-8);
}

TEST_CASE("pohozaev inequality direction for coercive non-homogeneous weight") {
  // rho = 1 + r^2 satisfies k rho <= (x, grad rho) with k = 0; solutions then
  // obey P(u) <= 0 (inequality, not identity).
  Params p;
  p.q = 4.0;
  p.lambda = 1.0;
  p.k = 0.0;
  auto rho = WeightModel::make_coercive(1.0, 2.0, 1.0);
  auto grid = grid_3d(1024, 9.0);
  auto rep = solve_groundstate(p, rho, grid, gaussian_field(grid, 1.0, 1.0));
  REQUIRE(rep.converged);
  CHECK(pohozaev_residual(rep.u, p, rho) <= 1e-6);
}

TEST_CASE("zero init rejected, q range enforced") {
  Params p;
  p.q = 4.0;
  auto rho = WeightModel::make_homogeneous(2.0);
  auto grid = grid_3d(256, 8.0);
  Field z(grid);
  CHECK_THROWS_AS(solve_groundstate(p, rho, grid, z), std::invalid_argument);

  Params pc = p;
  pc.q = 5.0; // 2*-1
  CHECK_THROWS_AS(solve_groundstate(pc, rho, grid, gaussian_field(grid, 1.0, 1.0)),
                  std::invalid_argument);
  Params plow = p;
  plow.q = 1.8;
  CHECK_THROWS_AS(solve_groundstate(plow, rho, grid, gaussian_field(grid, 1.0, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("q < 3 path needs a homogeneous weight") {
  Params p;
  p.q = 2.5;
  auto grid = grid_3d(256, 8.0);
  // vanishing weight has no homogeneity degree: the fiber path must refuse
  CHECK_THROWS_AS(solve_groundstate(p, WeightModel::make_vanishing_ball(1.0, 2.0),
                                    grid, gaussian_field(grid, 1.0, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("lambda = 0, q = 3 matches the shooting oracle") {
  Params p;
  p.q = 3.0;
  p.lambda = 0.0;
  auto rho = WeightModel::make_constant(1.0);
  auto grid = grid_3d(2048, 15.0);
  auto rep = solve_groundstate(p, rho, grid, gaussian_field(grid, 2.0, 1.5));
  REQUIRE(rep.converged);

  const auto shot = oracles::shoot_state(3, 3.0, 0, 1.0, 8.0);
  CHECK(shot.nehari_defect < 1e-4);
  CHECK(std::abs(rep.level - shot.level) / shot.level < 1e-3);
  // the classic scalar-field groundstate amplitude
  CHECK(rep.u[0] == doctest::Approx(shot.alpha).epsilon(5e-3));
}

TEST_CASE("fiber path q = 2.5 with rho = r") {
  Params p;
  p.q = 2.5;
  p.lambda = 1.0;
  auto rho = WeightModel::make_homogeneous(1.0);
  auto grid = grid_3d(1024, 10.0);
  auto rep = solve_groundstate(p, rho, grid, gaussian_field(grid, 1.0, 1.0));

  CHECK(rep.converged);
  CHECK(rep.level > 0.0);
  REQUIRE(rep.j_residual.has_value());
  CHECK(std::abs(*rep.j_residual) < 1e-4);
  CHECK(std::abs(rep.pohozaev_residual) < 1e-4);
  for (std::size_t i = 0; i < rep.u.size(); ++i)
    CHECK(rep.u[i] >= 0.0);

  // a-priori integral bounds at the converged level (k = kbar = 1)
  const auto e = energy(rep.u, p, rho);
  const auto b = apriori_bounds(rep.level, 1.0, p.q, 3);
  CHECK(p.mu * e.int_power <= b.delta_max + 1e-6);
  CHECK(p.lambda * p.lambda * e.int_rho_phi_u2 <= b.gamma_max + 1e-6);
}

TEST_CASE("q = 3 guarded Nehari route with coercive weight") {
  Params p;
  p.q = 3.0;
  p.lambda = 1.0;
  auto rho = WeightModel::make_homogeneous(2.0);
  auto grid = grid_3d(1024, 9.0);
  // workable init: the fiber of a concentrated bump has C > B
  auto rep = solve_groundstate(p, rho, grid, gaussian_field(grid, 1.0, 0.8));
  CHECK(rep.converged);
  CHECK(rep.level > 0.0);
  CHECK(rep.nehari_residual < 1e-8);
  // a wide bump has C <= B: the q = 3 fiber is degenerate from the start
  CHECK_THROWS_AS(solve_groundstate(p, rho, grid, gaussian_field(grid, 1.0, 1.2)),
                  std::runtime_error);
}

TEST_CASE("fiber path in higher dimensions") {
  SUBCASE("N = 4, q = 2.5") {
    Params p;
    p.dim = 4;
    p.q = 2.5;
    p.lambda = 1.0;
    auto rho = WeightModel::make_homogeneous(1.0);
    auto grid = std::make_shared<const RadialGrid>(make_grid(4, 10.0, 768));
    auto rep = solve_groundstate(p, rho, grid, gaussian_field(grid, 1.0, 1.0));
    CHECK(rep.converged);
    CHECK(rep.level > 0.0);
    CHECK(std::abs(rep.pohozaev_residual) < 1e-3);
    REQUIRE(rep.j_residual.has_value());
    CHECK(std::abs(*rep.j_residual) < 1e-3);
  }
  SUBCASE("N = 5, q = 2.2 below 2*-1 = 7/3") {
    Params p;
    p.dim = 5;
    p.q = 2.2;
    p.lambda = 0.5;
    auto rho = WeightModel::make_homogeneous(1.0);
    auto grid = std::make_shared<const RadialGrid>(make_grid(5, 10.0, 768));
    auto rep = solve_groundstate(p, rho, grid, gaussian_field(grid, 1.0, 1.0));
    CHECK(rep.converged);
    CHECK(rep.level > 0.0);
    CHECK(std::abs(rep.pohozaev_residual) < 1e-3);
  }
  SUBCASE("N = 4 critical q = 3 rejected") {
    Params p;
    p.dim = 4;
    p.q = 3.0;
    auto rho = WeightModel::make_homogeneous(1.0);
    auto grid = std::make_shared<const RadialGrid>(make_grid(4, 8.0, 256));
    CHECK_THROWS_AS(solve_groundstate(p, rho, grid, gaussian_field(grid, 1.0, 1.0)),
                    std::invalid_argument);
  }
}

TEST_CASE("continuation ladder: monotone trace, single-rung consistency") {
  Params p;
  p.q = 2.5;
  p.lambda = 1.0;
  auto rho = WeightModel::make_homogeneous(1.0);
  auto grid = grid_3d(512, 10.0);
  Field init = gaussian_field(grid, 1.0, 1.0);

  auto rep = continuation_mu(p, {0.5, 0.75, 1.0}, rho, grid, init);
  REQUIRE(rep.c_mu_trace.size() == 3);
  for (std::size_t i = 1; i < rep.c_mu_trace.size(); ++i)
    CHECK(rep.c_mu_trace[i].second <= rep.c_mu_trace[i - 1].second + 1e-6);

  // one-rung ladder at mu = 1 reproduces the plain groundstate level
  auto one = continuation_mu(p, {1.0}, rho, grid, init);
  Params pg = p;
  pg.mu = 1.0;
  auto direct = solve_groundstate(pg, rho, grid, init);
  CHECK(std::abs(one.level - direct.level) <= 1e-6 * std::abs(direct.level));

  CHECK_THROWS_AS(continuation_mu(p, {0.9, 0.6}, rho, grid, init),
                  std::invalid_argument);
  CHECK_THROWS_AS(continuation_mu(p, {}, rho, grid, init), std::invalid_argument);
}

TEST_CASE("mountain pass estimate brackets the groundstate level") {
  Params p;
  p.q = 4.0;
  p.lambda = 1.0;
  auto rho = WeightModel::make_homogeneous(2.0);
  auto grid = grid_3d(768, 9.0);
  auto gs = solve_groundstate(p, rho, grid, gaussian_field(grid, 1.0, 1.0));
  REQUIRE(gs.converged);

  Field end = make_negative_endpoint(p, rho, gaussian_field(grid, 1.0, 1.0));
  REQUIRE(energy(end, p, rho).total < 0.0);
  const double mp = mountain_pass_estimate(p, rho, grid, end, 24, 120);
  CHECK(mp >= gs.level - 1e-6);             // paths cross the Nehari set
  CHECK(std::abs(mp - gs.level) <= 0.01 * gs.level); // coincidence for q > 3

  CHECK_THROWS_AS(
      mountain_pass_estimate(p, rho, grid, gaussian_field(grid, 0.1, 1.0), 8, 5),
      std::invalid_argument);
}

TEST_CASE("mountain pass at q = 3 with vanishing weight stays above the "
          "constrained level") {
  Params p;
  p.q = 3.0;
  p.lambda = 6.0;
  auto rho = WeightModel::make_vanishing_ball(1.0, 2.0, 1.0);
  auto grid = grid_3d(768, 10.0);
  // init inside the zero set keeps the q = 3 fiber nondegenerate
  Field init = gaussian_field(grid, 1.0, 0.35);
  auto gs = solve_groundstate(p, rho, grid, init);
  CHECK(gs.level > 0.0);

  Field end = make_negative_endpoint(p, rho, init);
  const double mp = mountain_pass_estimate(p, rho, grid, end, 24, 120);
  CHECK(mp >= gs.level - 1e-6); // gap reported, never asserted to vanish
}

TEST_CASE("excited states: level ladder and node counts") {
  Params p;
  p.q = 4.0;
  p.lambda = 1.0;
  auto rho = WeightModel::make_homogeneous(2.0);
  auto grid = grid_3d(512, 9.0);
  SolveOptions opts;
  opts.interface_candidates = 8;

  auto m0 = excited_state(p, rho, grid, 0, opts);
  auto m1 = excited_state(p, rho, grid, 1, opts);
  CHECK(m1.level > m0.level);

  int changes = 0;
  double last = 0.0;
  const double floor_amp = 1e-6 * norm(m1.u, NormKind::Lp, 2.0);
  for (std::size_t i = 0; i < m1.u.size(); ++i) {
    if (std::abs(m1.u[i]) <= floor_amp)
      continue;
    if (last != 0.0 && m1.u[i] * last < 0.0)
      ++changes;
    last = m1.u[i];
  }
  CHECK(changes == 1);

  Params low_q;
  low_q.q = 2.5;
  CHECK_THROWS_AS(excited_state(low_q, rho, grid, 1, opts),
                  std::invalid_argument);
}

TEST_CASE("nonexistence flow decays in the hypothesis regime") {
  auto grid = grid_3d(512, 10.0);
  auto rho = WeightModel::make_coercive(1.0, 2.0, 1.0); // 1 + r^2 >= 1
  std::mt19937 rng(17);

  for (double q : {1.5, 2.0}) {
    Params p;
    p.q = q;
    p.lambda = 1.0;
    auto flow = nonexistence_flow(p, rho, grid, random_smooth_field(grid, rng));
    CHECK(flow.decayed);
    CHECK(flow.final_h1 < 1e-6);
    // monotone trace after the first step
    for (std::size_t i = 2; i < flow.trace.size(); ++i)
      CHECK(flow.trace[i] <= flow.trace[i - 1] * 1.5);
  }

  // scalar barrier: u^2 + u^3 - u^{q+1} > 0 for u > 0 when q <= 2
  for (double u : {0.1, 0.7, 1.0, 3.0, 10.0})
    CHECK(u * u + u * u * u - std::pow(u, 2.5) > 0.0);

  // control: q = 4 from beyond the mountain ridge must not decay
  Params pc;
  pc.q = 4.0;
  pc.lambda = 1.0;
  auto rho2 = WeightModel::make_homogeneous(2.0);
  Field big = make_negative_endpoint(pc, rho2, gaussian_field(grid, 1.0, 1.0));
  auto flow = nonexistence_flow(pc, rho2, grid, big);
  CHECK_FALSE(flow.decayed);
}

TEST_SUITE_END();
