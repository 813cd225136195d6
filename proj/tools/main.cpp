#include <array>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "driver.hpp"

using mpfs::cli::RunConfig;

namespace {

void add_run_options(CLI::App* app, RunConfig& c, std::string& out) {
  app->add_option("--case", c.case_name, "Case name (disk, annulus, rayleigh_taylor, disk_energy)")->capture_default_str();
  app->add_option("--resolution", c.resolution, "desk or full")->capture_default_str();
  app->add_option("--mesh", c.mesh, "Mesh size override (two integers, case specific)");
  app->add_option("--geometric-degree", c.geometric_degree, "Geometry degree of curved meshes (0: case default)");
  app->add_option("--tau", c.tau, "Time step (0: case default)");
  app->add_option("--T", c.T, "Final time (0: case default)");
  app->add_option("--steps", c.steps, "Number of steps; overrides --T");
  app->add_option("--velocity-degree", c.velocity_degree, "Velocity degree (0: case default)");
  app->add_option("--pressure-degree", c.pressure_degree, "Pressure degree (0: case default)");
  app->add_option("--phase-degree", c.phase_degree, "Transport degree (0: case default)");
  app->add_option("--formulation", c.formulation, "sqrt_variable, bounded_variable or raw");
  app->add_option("--chi", c.chi, "1: least-squares transport test functions, 0: Galerkin")->capture_default_str();
  app->add_option("--drag-cap", c.drag_cap, "Upper clip D of the drag coefficients")->capture_default_str();
  app->add_option("--tol", c.tol, "Relative tolerance of the momentum, pressure and saddle solves")->capture_default_str();
  app->add_flag("--implicit-viscous", c.implicit_viscous, "Implicit transpose-gradient viscous term");
  app->add_option("--vtk-every", c.vtk_every, "VTK snapshot cadence in steps (0: none)");
  app->add_flag("--quiet", c.quiet, "No progress output");
  app->add_option("--out", out, "Output directory name below $MPFS_OUTPUT_ROOT")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mpfs: dispersed multiphase flow simulator"};
  app.set_config("--config", "", "INI file; sections [run], [converge] and [compare] set subcommand options");
  bool deterministic = false;
  app.add_flag("--deterministic", deterministic, "Single-threaded, bit-reproducible execution (always the case)");
  app.require_subcommand(1);

  RunConfig run_cfg;
  std::string run_out = "run";
  auto* run = app.add_subcommand("run", "Run one case and write time series, ledger, VTK and a summary");
  add_run_options(run, run_cfg, run_out);
  run->add_option("--scheme", run_cfg.scheme, "fractional_step or monolithic")->capture_default_str();

  RunConfig conv_cfg;
  std::string conv_out = "converge";
  int refinements = 4;
  auto* conv = app.add_subcommand("converge", "Temporal convergence study against the exact solution");
  add_run_options(conv, conv_cfg, conv_out);
  conv->add_option("--scheme", conv_cfg.scheme, "fractional_step or monolithic")->capture_default_str();
  conv->add_option("--refinements", refinements, "Number of step halvings")->capture_default_str();

  RunConfig cmp_cfg;
  std::string cmp_out = "compare";
  std::string scheme_a = "fractional_step", scheme_b = "monolithic";
  std::vector<double> stations{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  cmp_cfg.case_name = "rayleigh_taylor";
  auto* cmp = app.add_subcommand("compare", "Run two schemes from the same initial state and report differences");
  add_run_options(cmp, cmp_cfg, cmp_out);
  cmp->add_option("--scheme-a", scheme_a, "Scheme of the first run")->capture_default_str();
  cmp->add_option("--scheme-b", scheme_b, "Scheme of the second run")->capture_default_str();
  std::array<int, 2> mesh_b{0, 0};
  std::string resolution_b;
  cmp->add_option("--mesh-b", mesh_b, "Mesh size of the second run (default: same as the first)");
  cmp->add_option("--resolution-b", resolution_b, "Resolution of the second run (default: same as the first)");
  cmp->add_option("--stations", stations, "x positions of the profile extracts");

  CLI11_PARSE(app, argc, argv);
  (void)deterministic;

  if (run->parsed()) return mpfs::cli::cmd_run(run_cfg, run_out);
  if (conv->parsed()) return mpfs::cli::cmd_converge(conv_cfg, refinements, conv_out);
  RunConfig a = cmp_cfg, b = cmp_cfg;
  a.scheme = scheme_a;
  b.scheme = scheme_b;
  if (mesh_b[0] > 0) b.mesh = mesh_b;
  if (!resolution_b.empty()) b.resolution = resolution_b;
  return mpfs::cli::cmd_compare(a, b, stations, cmp_out);
}
