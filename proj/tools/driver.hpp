#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mpfs/cases.hpp"
#include "mpfs/diagnostics.hpp"
#include "mpfs/fractional_step.hpp"

namespace mpfs::cli {

struct RunConfig {
  std::string case_name = "disk";
  std::string scheme = "fractional_step";  ///< or "monolithic"
  std::string resolution = "desk";
  std::array<int, 2> mesh{0, 0};
  int geometric_degree = 0;
  double tau = 0.0;  ///< 0 keeps the case default
  double T = 0.0;    ///< 0 keeps the case default
  int steps = 0;     ///< overrides T when positive
  int velocity_degree = 0;
  int pressure_degree = 0;
  int phase_degree = 0;
  std::string formulation;  ///< empty keeps the case default
  int chi = 1;
  double drag_cap = 1e6;
  double tol = 1e-10;
  bool implicit_viscous = false;
  int vtk_every = 0;  ///< 0 disables field output
  bool quiet = false;
};

struct RunResult {
  CaseDefinition def;
  std::shared_ptr<Discretization> disc;
  FlowState state;
  std::vector<TimeseriesRow> rows;
  std::vector<LedgerEntry> ledger;  ///< fractional-step runs only
  double tau = 0.0;
  int steps = 0;
  bool ok = true;
  int failed_step = -1;
  std::string error;
};

/// Time loop for one configuration. Files are written only when `out` is set.
RunResult simulate(const RunConfig& cfg, const std::optional<std::filesystem::path>& out);

/// Output directory: $MPFS_OUTPUT_ROOT (or the working directory) joined with `name`.
std::filesystem::path output_dir(const std::string& name);

int cmd_run(const RunConfig& cfg, const std::string& out_name);
int cmd_converge(const RunConfig& cfg, int refinements, const std::string& out_name);
int cmd_compare(const RunConfig& a, const RunConfig& b, const std::vector<double>& stations,
                const std::string& out_name);

}  // namespace mpfs::cli
