#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mpfs/constraints.hpp"
#include "mpfs/phase_transport.hpp"
#include "mpfs/space.hpp"
#include "mpfs/sparse.hpp"

namespace mpfs {

using TimeScalarFunction = std::function<double(const Vec2&, double)>;
using TimeVectorFunction = std::function<Vec2(const Vec2&, double)>;

struct PhaseParams {
  std::string name;
  double rho = 1.0;
  double mu = 0.0;
  TimeVectorFunction g;  ///< body force per unit mass; empty means zero
};

/// gamma(t, alpha_a, alpha_b, |u_a - u_b|) for a pair a < b.
using DragLaw = std::function<double(double t, double alpha_a, double alpha_b, double slip)>;

/// min(gamma, cap); negative or NaN coefficients are rejected.
double clip_drag(double gamma, double cap);

/// Symmetric pairwise drag coefficients with a global cap D.
class DragModel {
 public:
  explicit DragModel(double cap = 1e6);
  /// The law always receives the volume fraction of the lower phase index first.
  void set(int a, int b, DragLaw law);
  bool has(int a, int b) const;
  /// Clipped coefficient for the ordered pair (k, l); zero if no law is set.
  double coefficient(int k, int l, double t, double alpha_k, double alpha_l, double slip) const;
  double cap() const { return cap_; }
  std::vector<std::pair<int, int>> pairs() const;

 private:
  double cap_;
  std::map<std::pair<int, int>, DragLaw> laws_;
};

/// Velocity boundary data for one phase. Markers not listed are left natural
/// (only valid where the caller knows the flux vanishes).
struct VelocityBC {
  std::vector<std::string> dirichlet;
  TimeVectorFunction value;  ///< Dirichlet value; empty means zero
  std::vector<std::string> free_slip;
};

struct FlowProblem {
  std::vector<PhaseParams> phases;
  std::vector<VelocityBC> bcs;  ///< one entry per phase
  DragModel drag;

  int num_phases() const { return static_cast<int>(phases.size()); }
  double rho_min() const;
  void validate() const;
};

/// Spaces and quadrature shared by all sub-steps.
class Discretization {
 public:
  /// quad_order < 0 selects 2 * max(degrees) + 2.
  Discretization(MeshPtr mesh, int velocity_degree, int pressure_degree, int phase_degree, int quad_order = -1);

  const MeshPtr& mesh() const { return mesh_; }
  const SpacePtr& velocity() const { return velocity_; }
  const SpacePtr& velocity_scalar() const { return velocity_scalar_; }
  const SpacePtr& pressure() const { return pressure_; }
  const SpacePtr& phase() const { return phase_; }
  const QuadratureCache& qc() const { return *qc_; }
  const std::vector<double>& pressure_weights() const { return pressure_weights_; }
  const SparseMatrix& velocity_pattern() const { return velocity_pattern_; }
  const SparseMatrix& pressure_pattern() const { return pressure_pattern_; }

 private:
  MeshPtr mesh_;
  SpacePtr velocity_, velocity_scalar_, pressure_, phase_;
  std::shared_ptr<QuadratureCache> qc_;
  std::vector<double> pressure_weights_;
  SparseMatrix velocity_pattern_, pressure_pattern_;
};

/// Velocity constraints of one phase at time t on the vector velocity space.
ConstraintSet velocity_constraints(const Discretization& d, const VelocityBC& bc, double t);

struct PhaseState {
  FieldVector var;         ///< transported variable on the phase space
  FieldVector u;           ///< end-of-step velocity
  std::vector<Vec2> uhat;  ///< projected velocity at quadrature points
};

struct FlowState {
  double t = 0.0;
  int step = 0;
  Formulation formulation = Formulation::SqrtVariable;
  FieldVector p;
  std::vector<PhaseState> phases;

  FieldVector alpha(int k) const { return alpha_of(formulation, phases[k].var); }
};

/// State with nodally interpolated alpha and u, uhat = u at quadrature points and zero pressure.
FlowState make_initial_state(const Discretization& d, Formulation f, const std::vector<ScalarFunction>& alpha0,
                             const std::vector<VectorFunction>& u0, double t0 = 0.0);

/// Shift p to zero weighted mean.
void remove_pressure_mean(const Discretization& d, FieldVector& p);

}  // namespace mpfs
