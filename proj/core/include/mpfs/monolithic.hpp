#pragma once

#include <vector>

#include "mpfs/model.hpp"
#include "mpfs/solvers.hpp"

namespace mpfs {

enum class SaddlePreconditioner {
  /// upper block-triangular: inner velocity solves and a Schur approximation
  /// tau <c grad p, grad q> combined with an alpha/mu weighted pressure mass
  BlockTriangular,
  /// velocity diagonal and weighted pressure-mass diagonal
  BlockDiagonal,
};

struct MonolithicConfig {
  double tau = 0.01;
  TransportConfig transport;
  SolverSettings solver{1e-10, 1e-30, 3000, Preconditioner::Diagonal, 80};
  SaddlePreconditioner precond = SaddlePreconditioner::BlockTriangular;
  double inner_velocity_tol = 1e-2;
  double inner_pressure_tol = 1e-2;
};

struct MonolithicStats {
  std::vector<SolveStats> transport;
  SolveStats saddle;
  double divergence_max = 0.0;  ///< max_q |sum_k <alpha_k^{n+1} u_k^{n+1}, grad q>|
  double rhs_norm = 0.0;        ///< ||right-hand side of the coupled system||_2
};

/// Semi-monolithic step: implicit symmetric-gradient viscosity, implicit drag coupling
/// with coefficients from level n, a shared implicit pressure and the weak constraint
/// <sum_k alpha_k u_k, grad q> = 0. Pressure mean is fixed by a scalar multiplier.
/// Unknowns are ordered [u_1 | ... | u_M | p | lambda].
class MonolithicScheme {
 public:
  /// Requires velocity degree 2 and pressure degree 1.
  MonolithicScheme(const Discretization& d, const FlowProblem& problem, MonolithicConfig cfg);

  const MonolithicConfig& config() const { return cfg_; }
  FlowState advance(const FlowState& s, MonolithicStats* stats = nullptr) const;

 private:
  void build_pattern() const;

  const Discretization* d_;
  const FlowProblem* problem_;
  MonolithicConfig cfg_;
  mutable SparseMatrix pattern_, vv_pattern_, pv_pattern_;
};

}  // namespace mpfs
