// Batch front end: parse a run config, dispatch solves/sweeps/audits, emit
// CSV/JSON results and SVG plots.

#include <CLI11.hpp>

#include "spsolve/driver.hpp"
#include "spsolve/report_io.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

std::size_t resolve_threads(std::size_t cli_threads) {
  if (cli_threads > 0)
    return cli_threads;
  if (const char* env = std::getenv("SPSOLVE_THREADS")) {
    const long v = std::atol(env);
    if (v > 0)
      return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

int report(const spsolve::RunOutcome& out) {
  if (!out.message.empty())
    std::cout << out.message << '\n';
  for (const auto& f : out.files)
    std::cout << "wrote " << f << '\n';
  return out.exit_code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"spsolve — radial Schrodinger-Poisson variational solver"};
  app.require_subcommand(1);

  std::string config_path, out_dir, axis, values_csv, plot_input;
  long seed = -1;
  std::size_t threads = 0;
  double tol = 0.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run config (TOML-style or JSON)")
        ->required();
    cmd->add_option("--out", out_dir, "output directory override");
    cmd->add_option("--seed", seed, "seed override for random inits");
    cmd->add_option("--tol", tol, "gradient tolerance override");
    cmd->add_option("--threads", threads, "worker threads (env SPSOLVE_THREADS)");
  };

  auto* cmd_run = app.add_subcommand("run", "solve one configuration");
  add_common(cmd_run);

  auto* cmd_sweep = app.add_subcommand("sweep", "solve along a parameter axis");
  add_common(cmd_sweep);
  cmd_sweep->add_option("--axis", axis, "lambda | q | kbar | m | mu")->required();
  cmd_sweep->add_option("--values", values_csv, "comma-separated axis values")
      ->required();

  auto* cmd_plot = app.add_subcommand("plot", "render SVG from a result CSV");
  cmd_plot->add_option("input", plot_input, "profile or sweep CSV")->required();
  cmd_plot->add_option("--out", out_dir, "output directory");

  auto* cmd_verify = app.add_subcommand("verify", "run the invariant suite");
  (void)cmd_verify;

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("verify"))
      return spsolve::verify(std::cout);

    if (app.got_subcommand("plot"))
      return report(spsolve::plot(plot_input, out_dir.empty() ? "." : out_dir));

    spsolve::RunConfig cfg = spsolve::load_config(config_path);
    if (!out_dir.empty())
      cfg.out_directory = out_dir;
    if (seed >= 0)
      cfg.seed = static_cast<unsigned>(seed);
    if (tol > 0.0)
      cfg.solver.grad_tol = tol;

    if (app.got_subcommand("run"))
      return report(spsolve::run(cfg));

    // sweep
    std::vector<double> values;
    std::stringstream ss(values_csv);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty())
        values.push_back(std::stod(item));
    return report(spsolve::sweep(cfg, axis, values, resolve_threads(threads)));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
