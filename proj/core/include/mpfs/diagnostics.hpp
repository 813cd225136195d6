#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "mpfs/cases.hpp"
#include "mpfs/fractional_step.hpp"
#include "mpfs/model.hpp"

namespace mpfs {

/// sum_k 1/2 rho_k ||sqrt(alpha_k) u_k||^2
double kinetic_energy(const Discretization& d, const FlowProblem& problem, const FlowState& s);

/// |Omega|^{-1} || div(sum_k alpha_k uhat_k) ||_{L2}, with uhat_k given as velocity-space fields.
double divergence_error(const Discretization& d, const FlowState& s, const std::vector<FieldVector>& uhat);

/// | sum_k int alpha_k - |Omega| | / |Omega|  (equals the sum of ||phi_k||^2 for the sqrt variable).
double partition_error(const Discretization& d, const FlowState& s);
/// |Omega|^{-1} || sum_k alpha_k - 1 ||_{L1}
double partition_error_l1(const Discretization& d, const FlowState& s);

/// Smallest nodal alpha over all phases.
double alpha_min_nodal(const FlowState& s);
/// Largest nodal alpha over all phases.
double alpha_max_nodal(const FlowState& s);

struct ErrorReport {
  double e_p = 0.0;      ///< relative L2 error of the zero-mean pressure
  double e_u = 0.0;      ///< relative H1-seminorm error of u_2 - u_1
  double e_div = 0.0;
  double e_alpha = 0.0;
};

/// Errors against an exact solution at s.t. Exact gradients use central differences.
ErrorReport manufactured_errors(const Discretization& d, const FlowState& s, const ExactSolution& exact,
                                const std::vector<FieldVector>& uhat);

/// Least-squares slope of log(error) against log(tau) over the `last` smallest steps.
/// Returns NaN when fewer than two usable points remain.
double fit_order(const std::vector<double>& tau, const std::vector<double>& error, int last = 4);

struct LedgerSummary {
  int steps = 0;
  double worst_relative_residual = 0.0;
  std::vector<int> violations;  ///< steps whose residual exceeds slack * scale
  StabilityLedger::Bound bound;
  bool ok() const { return violations.empty() && bound.holds(); }
};

LedgerSummary ledger_report(const StabilityLedger& ledger, double slack = 1e-6);

struct TimeseriesRow {
  double t = 0.0;
  double e_kinetic = 0.0;
  double e_div = 0.0;
  double partition = 0.0;
  double alpha_min = 0.0;
  double psi_total = 0.0;
  double ineq_residual = 0.0;
};

void write_timeseries_header(std::ostream& os);
void write_timeseries_row(std::ostream& os, const TimeseriesRow& r);

void write_ledger_header(std::ostream& os);
void write_ledger_row(std::ostream& os, const LedgerEntry& e);

/// Shortest round-trip representation of a double.
std::string format_double(double v);

}  // namespace mpfs
