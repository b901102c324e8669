#include "spsolve/driver.hpp"

#include "spsolve/diagnostics.hpp"
#include "spsolve/fibering.hpp"
#include "spsolve/report_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

namespace fs = std::filesystem;

namespace spsolve {

namespace {

std::shared_ptr<const RadialGrid> build_grid(const RunConfig& cfg) {
  return std::make_shared<const RadialGrid>(
      make_grid(cfg.problem.dim, cfg.r_max, cfg.n, cfg.spacing));
}

Field build_init(const RunConfig& cfg, std::shared_ptr<const RadialGrid> grid) {
  if (cfg.init_kind == "random") {
    std::mt19937 rng(cfg.seed);
    return random_smooth_field(std::move(grid), rng);
  }
  return gaussian_field(std::move(grid), cfg.init_amplitude, cfg.init_width);
}

bool wants(const RunConfig& cfg, const std::string& fmt) {
  for (const auto& f : cfg.formats)
    if (f == fmt)
      return true;
  return false;
}

// Rejects requests at the critical exponent with the nonexistence audit.
void guard_critical_q(const RunConfig& cfg) {
  const double qc1 = critical_exponent(cfg.problem.dim) - 1.0;
  if (std::abs(cfg.problem.q - qc1) < 1e-9) {
    Params p = cfg.problem;
    p.q = qc1;
    const double k = cfg.problem.k.value_or(
        cfg.weight.homogeneity_degree().value_or(0.0));
    const auto audit = critical_nonexistence_audit(p, k);
    throw std::invalid_argument("q = 2*-1 rejected: " + audit.explanation);
  }
}

SolveReport dispatch_solve(const RunConfig& cfg,
                           std::shared_ptr<const RadialGrid> grid) {
  const Field init = build_init(cfg, grid);
  switch (cfg.mode) {
  case SolveMode::continuation: {
    std::vector<double> ladder = cfg.mu_ladder;
    if (ladder.empty())
      ladder = {0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    return continuation_mu(cfg.problem, ladder, cfg.weight, grid, init,
                           cfg.solver);
  }
  case SolveMode::excited:
    return excited_state(cfg.problem, cfg.weight, grid, cfg.nodes, cfg.solver);
  default:
    return solve_groundstate(cfg.problem, cfg.weight, grid, init, cfg.solver);
  }
}

void write_solution_artifacts(const RunConfig& cfg, const SolveReport& rep,
                              RunOutcome& out) {
  const fs::path dir(cfg.out_directory);
  fs::create_directories(dir);
  const std::string prefix = mode_name(cfg.mode);

  Field phi = solve_phi(*rep.u.grid, cfg.weight, rep.u);
  if (wants(cfg, "csv")) {
    const auto p = (dir / (prefix + "_profile.csv")).string();
    write_profile_csv(p, rep.u, phi);
    out.files.push_back(p);
  }
  if (wants(cfg, "json")) {
    const auto p = (dir / (prefix + "_report.json")).string();
    write_report_json(p, cfg, rep);
    out.files.push_back(p);
  }
  if (wants(cfg, "svg")) {
    {
      const auto p = (dir / (prefix + "_u.svg")).string();
      write_svg_chart(p, "u(r)", {{"u", rep.u.grid->r, rep.u.v}});
      out.files.push_back(p);
    }
    {
      const auto p = (dir / (prefix + "_phi.svg")).string();
      write_svg_chart(p, "phi(r)", {{"phi", phi.grid->r, phi.v}});
      out.files.push_back(p);
    }
    {
      // energy along the Nehari fiber t -> I(t u), closed form in t
      const auto e = energy(rep.u, cfg.problem, cfg.weight);
      const double A = 0.5 * (e.int_grad2 + e.int_u2);
      const double B = 0.25 * cfg.problem.lambda * cfg.problem.lambda *
                       e.int_rho_phi_u2;
      const double C = cfg.problem.mu / (cfg.problem.q + 1.0) * e.int_power;
      SvgSeries s;
      s.label = "I(t u)";
      for (int i = 0; i <= 64; ++i) {
        const double t = 1.6 * i / 64.0;
        s.x.push_back(t);
        s.y.push_back(A * t * t + B * t * t * t * t -
                      C * std::pow(t, cfg.problem.q + 1.0));
      }
      const auto p = (dir / (prefix + "_fiber.svg")).string();
      write_svg_chart(p, "energy along t -> t u", {s});
      out.files.push_back(p);
    }
  }
}

} // namespace

//==============================================================================
RunOutcome run(const RunConfig& cfg) {
  RunOutcome out;
  try {
    validate_config(cfg);
    if (cfg.mode == SolveMode::verify) {
      out.exit_code = verify(std::cout);
      return out;
    }
    guard_critical_q(cfg);

    auto grid = build_grid(cfg);

    if (cfg.mode == SolveMode::mountain_pass) {
      const Field endpoint =
          make_negative_endpoint(cfg.problem, cfg.weight, build_init(cfg, grid));
      const double level =
          mountain_pass_estimate(cfg.problem, cfg.weight, grid, endpoint,
                                 cfg.path_nodes, cfg.sweeps, cfg.solver);
      SolveReport rep;
      rep.u = endpoint;
      rep.level = level;
      rep.converged = true;
      write_solution_artifacts(cfg, rep, out);
      out.message = "mountain-pass level estimate " + format_double(level);
      return out;
    }

    if (cfg.mode == SolveMode::nonexistence) {
      const auto flow = nonexistence_flow(cfg.problem, cfg.weight, grid,
                                          build_init(cfg, grid), cfg.solver);
      const fs::path dir(cfg.out_directory);
      fs::create_directories(dir);
      nlohmann::json j;
      j["mode"] = "nonexistence";
      j["decayed"] = flow.decayed;
      j["final_h1"] = flow.final_h1;
      j["iterations"] = flow.iterations;
      j["trace"] = flow.trace;
      const auto p = (dir / "nonexistence_report.json").string();
      std::ofstream f(p, std::ios::binary);
      f << j.dump(2) << '\n';
      out.files.push_back(p);
      if (wants(cfg, "csv")) {
        Field phi = solve_phi(*flow.u.grid, cfg.weight, flow.u);
        const auto pc = (dir / "nonexistence_profile.csv").string();
        write_profile_csv(pc, flow.u, phi);
        out.files.push_back(pc);
      }
      out.exit_code = flow.decayed ? 0 : 2;
      out.message = flow.decayed ? "flow decayed below 1e-6 in H1"
                                 : "flow did not decay";
      return out;
    }

    const SolveReport rep = dispatch_solve(cfg, grid);
    write_solution_artifacts(cfg, rep, out);
    out.exit_code = rep.converged ? 0 : 2;
    out.message = (rep.converged ? "converged, level " : "NOT converged, level ") +
                  format_double(rep.level);
    return out;
  } catch (const std::invalid_argument& e) {
    out.exit_code = 1;
    out.message = e.what();
    return out;
  } catch (const std::exception& e) {
    out.exit_code = 2;
    out.message = e.what();
    return out;
  }
}

//==============================================================================
RunOutcome sweep(const RunConfig& cfg, const std::string& axis,
                 std::vector<double> values, std::size_t threads) {
  RunOutcome out;
  if (axis != "lambda" && axis != "q" && axis != "kbar" && axis != "m" &&
      axis != "mu") {
    out.exit_code = 1;
    out.message = "invalid sweep axis '" + axis + "' (lambda, q, kbar, m, mu)";
    return out;
  }
  try {
    validate_config(cfg);
    std::sort(values.begin(), values.end());

    auto grid = build_grid(cfg);
    std::vector<SweepRow> rows(values.size());

    auto solve_point = [&](double value) {
      RunConfig point = cfg;
      if (axis == "lambda")
        point.problem.lambda = value;
      else if (axis == "q")
        point.problem.q = value;
      else if (axis == "mu")
        point.problem.mu = value;
      else if (axis == "kbar") {
        if (point.weight.kind != WeightKind::homogeneous)
          throw std::invalid_argument("kbar sweep requires a homogeneous weight");
        point.weight.kbar = value;
        point.problem.kbar = value;
        point.problem.nu.reset();
      } else if (axis == "m") {
        point.mode = SolveMode::excited;
        point.nodes = static_cast<std::size_t>(std::llround(value));
      }
      return dispatch_solve(point, grid);
    };

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= values.size())
          return;
        SweepRow row;
        row.value = values[i];
        try {
          const SolveReport rep = solve_point(values[i]);
          row.level = rep.level;
          row.grad_residual = rep.grad_residual;
          row.nehari_residual = rep.nehari_residual;
          row.pohozaev_residual = rep.pohozaev_residual;
          row.converged = rep.converged;
        } catch (const std::exception&) {
          row.level = std::nan("");
          row.converged = false;
        }
        rows[i] = row;
      }
    };

    const std::size_t nt =
        std::max<std::size_t>(1, std::min(threads, values.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nt; ++t)
      pool.emplace_back(worker);
    for (auto& th : pool)
      th.join();

    const fs::path dir(cfg.out_directory);
    fs::create_directories(dir);
    const auto p = (dir / ("sweep_" + axis + ".csv")).string();
    write_sweep_csv(p, axis, rows);
    out.files.push_back(p);
    if (wants(cfg, "svg") && !rows.empty()) {
      SvgSeries s;
      s.label = "level";
      for (const auto& r : rows)
        if (std::isfinite(r.level)) {
          s.x.push_back(r.value);
          s.y.push_back(r.level);
        }
      if (!s.x.empty()) {
        const auto ps = (dir / ("sweep_" + axis + ".svg")).string();
        write_svg_chart(ps, "level vs " + axis, {s});
        out.files.push_back(ps);
      }
    }
    out.message = "swept " + std::to_string(values.size()) + " points";
    return out;
  } catch (const std::invalid_argument& e) {
    out.exit_code = 1;
    out.message = e.what();
    return out;
  } catch (const std::exception& e) {
    out.exit_code = 2;
    out.message = e.what();
    return out;
  }
}

//==============================================================================
RunOutcome plot(const std::string& csv_path, const std::string& out_dir) {
  RunOutcome out;
  try {
    std::ifstream in(csv_path);
    if (!in)
      throw std::invalid_argument("plot: cannot open '" + csv_path + "'");
    std::string header;
    std::getline(in, header);
    in.close();

    fs::create_directories(out_dir);
    const std::string stem = fs::path(csv_path).stem().string();

    if (header.rfind("r,u,phi", 0) == 0) {
      const ProfileData d = read_profile_csv(csv_path);
      if (d.r.empty())
        throw std::invalid_argument("plot: zero-length profile");
      const auto pu = (fs::path(out_dir) / (stem + "_u.svg")).string();
      write_svg_chart(pu, "u(r)", {{"u", d.r, d.u}});
      out.files.push_back(pu);
      const auto pp = (fs::path(out_dir) / (stem + "_phi.svg")).string();
      write_svg_chart(pp, "phi(r)", {{"phi", d.r, d.phi}});
      out.files.push_back(pp);
    } else {
      // sweep table: first column is the axis, second the level
      std::ifstream f(csv_path);
      std::string line;
      std::getline(f, line);
      const std::string axis = line.substr(0, line.find(','));
      SvgSeries s;
      s.label = "level";
      while (std::getline(f, line)) {
        double x, y;
        if (std::sscanf(line.c_str(), "%lf,%lf", &x, &y) == 2 &&
            std::isfinite(y)) {
          s.x.push_back(x);
          s.y.push_back(y);
        }
      }
      if (s.x.empty())
        throw std::invalid_argument("plot: no plottable rows in '" + csv_path + "'");
      const auto ps = (fs::path(out_dir) / (stem + ".svg")).string();
      write_svg_chart(ps, "level vs " + axis, {s});
      out.files.push_back(ps);
    }
    return out;
  } catch (const std::exception& e) {
    out.exit_code = 1;
    out.message = e.what();
    return out;
  }
}

//==============================================================================
int verify(std::ostream& log) {
  int failures = 0;
  auto check = [&](const char* name, bool ok, double detail) {
    log << (ok ? "PASS " : "FAIL ") << name << "  (" << detail << ")\n";
    if (!ok)
      ++failures;
  };

  // quadrature closed forms
  {
    auto g3 = make_grid(3, 10.0, 2048);
    std::vector<double> one(g3.size(), 1.0);
    const double vol = integrate(g3, one);
    const double exact = 4.0 * M_PI * 1e3 / 3.0;
    check("grid.ball_volume_N3", std::abs(vol - exact) / exact < 1e-6,
          std::abs(vol - exact) / exact);

    auto grid = std::make_shared<const RadialGrid>(make_grid(3, 10.0, 4096));
    Field gsq = Field::from_function(grid, [](double r) { return std::exp(-r * r); });
    const double gint = integrate(*grid, gsq.v);
    check("grid.gaussian_integral", std::abs(gint - std::pow(M_PI, 1.5)) /
                                            std::pow(M_PI, 1.5) < 1e-8,
          std::abs(gint - std::pow(M_PI, 1.5)) / std::pow(M_PI, 1.5));
  }

  // uniform-ball Newtonian potential
  {
    const std::size_t n = 4096;
    auto grid = std::make_shared<const RadialGrid>(make_grid(3, 4.0, n));
    Field u(grid);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = grid->r[i];
      u[i] = r < 1.0 ? 1.0 : (r == 1.0 ? std::sqrt(0.5) : 0.0);
    }
    Field phi = solve_phi(*grid, WeightModel::make_constant(1.0), u);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = grid->r[i];
      const double exact = r <= 1.0 ? (3.0 - r * r) / 6.0 : 1.0 / (3.0 * r);
      worst = std::max(worst, std::abs(phi[i] - exact) / exact);
    }
    check("poisson.uniform_ball", worst < 1e-6, worst);
  }

  // energy identity + Coulomb-Sobolev gap on seeded fields
  {
    auto grid = std::make_shared<const RadialGrid>(make_grid(3, 12.0, 4096));
    std::mt19937 rng(42);
    const WeightModel rhos[] = {
        WeightModel::make_constant(1.0), WeightModel::make_homogeneous(1.0),
        WeightModel::make_homogeneous(2.0),
        WeightModel::make_vanishing_ball(1.0, 2.0, 1.0)};
    double worst_id = 0.0, worst_gap = 0.0;
    for (int t = 0; t < 10; ++t) {
      Field u = random_smooth_field(grid, rng);
      for (const auto& rho : rhos) {
        Field phi = solve_phi(*grid, rho, u);
        worst_id = std::max(worst_id, phi_identity_residual(*grid, rho, u, phi));
        worst_gap = std::min(worst_gap, coulomb_sobolev_gap(u, rho));
      }
    }
    check("poisson.energy_identity", worst_id < 1e-6, worst_id);
    check("functionals.coulomb_sobolev_gap", worst_gap > -1e-8, worst_gap);
  }

  // gradient pairing against central differences
  {
    auto grid = std::make_shared<const RadialGrid>(make_grid(3, 10.0, 512));
    std::mt19937 rng(7);
    Params p;
    p.q = 3.5;
    p.lambda = 1.0;
    const auto rho = WeightModel::make_homogeneous(1.0);
    Field u = random_smooth_field(grid, rng);
    Field v = random_smooth_field(grid, rng);
    Field gr = gradient_field(u, p, rho);
    double pair = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      pair += grid->w[i] * gr[i] * v[i];
    double prev = 0.0;
    bool second_order = true;
    for (int k = 0; k < 3; ++k) {
      const double eps = 2e-3 / std::pow(2.0, k);
      const double ip = energy(u + eps * v, p, rho).total;
      const double im = energy(u - eps * v, p, rho).total;
      const double err = std::abs((ip - im) / (2.0 * eps) - pair);
      if (k > 0)
        second_order = second_order && (prev / err > 3.5);
      prev = err;
    }
    check("functionals.gradient_pairing_order2", second_order, prev);
  }

  // fibering uniqueness and the worked polynomial
  {
    FiberPolynomial fp;
    fp.a = fp.b = fp.c = fp.d = 1.0;
    fp.exponents = {3.0, 1.0, 1.0, 5.0};
    const double t = fiber_argmax(fp);
    check("fibering.worked_case", std::abs(t - 1.0) < 1e-10 &&
                                      std::abs(fp.eval(t) - 2.0) < 1e-10,
          t);

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> qd(2.05, 2.95), cd(0.1, 10.0);
    bool all_unique = true;
    for (int trial = 0; trial < 100 && all_unique; ++trial) {
      const double q = qd(rng);
      const double kbar = kbar_threshold(3, q) + cd(rng) * 0.3;
      const double nu = default_nu(3, q, kbar);
      FiberPolynomial f;
      f.a = cd(rng);
      f.b = cd(rng);
      f.c = cd(rng) - 0.1;
      if (f.c < 0.0)
        f.c = 0.0;
      f.d = cd(rng);
      f.exponents = {2 * nu + 2 - 3, 2 * nu - 3, 4 * nu - 3 - 2 - 2 * kbar,
                     nu * (q + 1) - 3};
      int sign_changes = 0;
      double prev_sign = 1.0;
      for (int i = 0; i <= 10000; ++i) {
        const double tt = std::pow(10.0, -4.0 + 8.0 * i / 10000.0);
        const double d = f.derivative(tt);
        const double s = d > 0 ? 1.0 : -1.0;
        if (i > 0 && s != prev_sign)
          ++sign_changes;
        prev_sign = s;
      }
      all_unique = sign_changes == 1;
    }
    check("fibering.unique_maximum_sample", all_unique, 100);
  }

  // closed-form constants
  {
    const double s3 = s_lambda_const(3.0, 2.0, 2.0);
    check("diagnostics.s_lambda_closed_form", s3 == 1.0 / 1728.0, s3);
    const double kb = kbar_threshold(5, 2.1);
    check("diagnostics.kbar_threshold", std::abs(kb - 0.125) < 1e-12, kb);
    const double Cbar = 1.7, mbar = 0.9, q = 3.6;
    const double l1 = lambda1_threshold(q, mbar, Cbar);
    const double closed = s_lambda_const(q, l1, mbar);
    const double target = std::pow(sobolev_S3(), 3) / (4.0 * std::pow(Cbar, 4));
    check("diagnostics.lambda1_closure",
          std::abs(closed - target) / target < 1e-12,
          std::abs(closed - target) / target);
  }

  log << (failures == 0 ? "verify: all checks passed\n"
                        : "verify: FAILURES present\n");
  return failures == 0 ? 0 : 2;
}

} // namespace spsolve
