#pragma once

#include <string>
#include <vector>

#include "mpfs/solvers.hpp"
#include "mpfs/space.hpp"

namespace mpfs {

/// Which variable carries the volume fraction.
///  - SqrtVariable:    phi = sqrt(alpha)
///  - BoundedVariable: phi = sqrt(alpha) / (1 - sqrt(alpha)), so alpha = (phi / (1 + |phi|))^2 < 1
///  - Raw:             alpha itself
enum class Formulation { SqrtVariable, BoundedVariable, Raw };

std::string to_string(Formulation f);
Formulation formulation_from_string(const std::string& s);

struct TransportConfig {
  Formulation formulation = Formulation::SqrtVariable;
  /// 1: least-squares test functions zeta/tau + L zeta; 0: plain Galerkin.
  int chi = 1;
  SolverSettings solver{1e-12, 1e-30, 20000, Preconditioner::Diagonal, 60};
};

/// Pointwise maps between alpha and the transported variable.
double alpha_from(Formulation f, double var);
double dalpha_dvar(Formulation f, double var);
double var_from_alpha(Formulation f, double alpha);

/// Nodal (interpolation) versions of the maps.
FieldVector alpha_of(Formulation f, const FieldVector& var);
FieldVector changed_variable_of(Formulation f, const FieldVector& alpha);

/// alpha at every quadrature point, obtained by mapping the point value of the variable.
std::vector<double> alpha_at_qp(Formulation f, const FieldVector& var, const QuadratureCache& qc);

/// One implicit Euler step of the transport equation for the chosen variable,
/// advected by the explicit velocity `u` (a vector field on the same mesh).
///
/// The operator is L z = u . grad z + c z with
///   c = div(u) / 2                 (sqrt variable)
///   c = div(u) (1 + |var_old|) / 2 (bounded variable)
///   c = div(u)                     (raw)
/// and the step solves <(z - z_old)/tau + L z, zeta/tau + chi L zeta> = 0 for all zeta.
FieldVector transport_step(const FieldVector& var_old, const FieldVector& u, double tau, const TransportConfig& cfg,
                           const QuadratureCache& qc, SolveStats* stats = nullptr);

/// Terms of the discrete energy identity of the sqrt-variable step with chi = 1:
///   ||z_new||^2 + ||z_new - z_old + tau L z_new||^2 + tau^2 ||L z_new||^2 = ||z_old||^2
/// where L uses u at the old time level.
struct TransportBalance {
  double norm_new_sq = 0.0;
  double norm_old_sq = 0.0;
  double increment_sq = 0.0;  ///< ||z_new - z_old + tau L z_new||^2
  double operator_sq = 0.0;   ///< tau^2 ||L z_new||^2
  double defect() const { return norm_new_sq + increment_sq + operator_sq - norm_old_sq; }
};

TransportBalance sqrt_transport_balance(const FieldVector& var_old, const FieldVector& var_new, const FieldVector& u,
                                        double tau, const QuadratureCache& qc);

}  // namespace mpfs
