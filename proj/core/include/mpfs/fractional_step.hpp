#pragma once

#include <vector>

#include "mpfs/model.hpp"
#include "mpfs/solvers.hpp"

namespace mpfs {

struct SchemeConfig {
  double tau = 0.01;
  TransportConfig transport;
  SolverSettings momentum_solver{1e-10, 1e-30, 20000, Preconditioner::Diagonal, 60};
  SolverSettings pressure_solver{1e-10, 1e-30, 20000, Preconditioner::Diagonal, 60};
  /// Treat the transpose-gradient viscous term implicitly (couples the components).
  bool implicit_viscous = false;
  /// Warn when alpha at a quadrature point drops below this value.
  double alpha_warn = 1e-6;
};

/// Per-step terms of the discrete energy inequality
///   sum_k (Psi_k^{n+1} - Psi_k^n) + viscous + drag <= growth.
struct LedgerEntry {
  int step = 0;  ///< index n + 1 of the new level
  double t = 0.0;
  std::vector<double> psi;  ///< Psi_k^{n+1}
  double psi_old = 0.0;     ///< sum_k Psi_k^n
  double psi_new = 0.0;     ///< sum_k Psi_k^{n+1}
  double viscous = 0.0;     ///< tau sum_k mu_k ||sqrt(a^{n+1}) grad u^{n+1} + sqrt(a^n) grad^T u^n||^2
  double drag = 0.0;        ///< tau sum_k sum_l ||sqrt(gamma_kl) (uhat_k^n - uhat_l^n)||^2
  double kinetic_old = 0.0; ///< sum_k rho_k ||sqrt(a^n) uhat_k^n||^2
  double beta = 0.0;        ///< drag ratio measured at level n
  double growth = 0.0;      ///< [2 tau (M - 1) beta]^2 kinetic_old
  double alpha_min = 0.0;   ///< min over phases and quadrature points of alpha^n and alpha^{n+1}
  double divergence_max = 0.0;    ///< max_q |sum_k <alpha_k^{n+1} uhat_k^{n+1}, grad q>|
  double divergence_scale = 0.0;  ///< tau ||PPE right-hand side||_2

  double residual() const { return psi_new - psi_old + viscous + drag - growth; }
  double scale() const { return psi_new + psi_old + viscous + drag + growth; }
};

struct StepStats {
  std::vector<SolveStats> transport;
  std::vector<SolveStats> momentum;  ///< one per solve
  SolveStats pressure;
};

/// Accumulates ledger entries and evaluates the Gronwall bound at the end of a run.
class StabilityLedger {
 public:
  StabilityLedger(const FlowProblem& problem, double tau) : problem_(&problem), tau_(tau) {}
  void add(const LedgerEntry& e);
  const std::vector<LedgerEntry>& entries() const { return entries_; }

  struct Bound {
    double lhs = 0.0;             ///< sum_k Psi_k^N + accumulated dissipation
    double bound_measured = 0.0;  ///< with the largest measured drag ratio
    double bound_cap = 0.0;       ///< with D / (rho_min alpha_min); may be infinite
    double beta_max = 0.0;
    double alpha_min = 0.0;
    bool holds() const { return lhs <= bound_measured * (1 + 1e-9) && lhs <= bound_cap * (1 + 1e-9); }
  };
  Bound gronwall() const;
  double worst_relative_residual() const;

 private:
  const FlowProblem* problem_;
  double tau_;
  std::vector<LedgerEntry> entries_;
};

class FractionalStepScheme {
 public:
  FractionalStepScheme(const Discretization& d, const FlowProblem& problem, SchemeConfig cfg);

  const SchemeConfig& config() const { return cfg_; }
  const Discretization& discretization() const { return *d_; }
  const FlowProblem& problem() const { return *problem_; }

  /// Pressure consistent with the initial data via the Neumann problem
  /// <c grad p, grad q> = sum_k <f_k, grad q>, c = sum_k alpha_k / rho_k.
  FieldVector initialize_pressure(const FlowState& s) const;

  FlowState advance(const FlowState& s, LedgerEntry* ledger = nullptr, StepStats* stats = nullptr) const;

  /// Sum of the per-phase energies Psi_k of a state.
  std::vector<double> psi(const FlowState& s) const;

  /// Number of momentum matrices assembled so far (one per phase and step).
  int momentum_assemblies() const { return momentum_assemblies_; }

  /// Velocity projection of uhat onto the velocity space (weighted by alpha^{n+1}); used for output.
  FieldVector projected_velocity_field(const FlowState& s, int k) const;

 private:
  struct Levels;
  struct DragTerms;

  DragTerms drag_terms(const FlowState& s, const Levels& lv) const;
  FieldVector momentum_step(const FlowState& s, int k, const Levels& lv, const DragTerms& drag, double t_new,
                            std::vector<SolveStats>* stats) const;
  FieldVector pressure_step(const FlowState& s, const std::vector<FieldVector>& u_new, const Levels& lv,
                            SolveStats* stats, double* rhs_norm) const;
  std::vector<Vec2> projection_step(const FlowState& s, int k, const FieldVector& u_new, const FieldVector& p_new,
                                    const Levels& lv) const;

  const Discretization* d_;
  const FlowProblem* problem_;
  SchemeConfig cfg_;
  mutable int momentum_assemblies_ = 0;
};

}  // namespace mpfs
