#include "mpfs/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mpfs/assembly.hpp"

namespace mpfs {

double clip_drag(double gamma, double cap) {
  if (!(gamma >= 0.0)) throw std::domain_error("drag coefficient must be non-negative, got " + std::to_string(gamma));
  return std::min(gamma, cap);
}

DragModel::DragModel(double cap) : cap_(cap) {
  if (!(cap > 0.0)) throw std::invalid_argument("drag cap must be positive");
}

void DragModel::set(int a, int b, DragLaw law) {
  if (a == b || a < 0 || b < 0) throw std::invalid_argument("drag needs two distinct phases");
  laws_[{std::min(a, b), std::max(a, b)}] = std::move(law);
}

bool DragModel::has(int a, int b) const { return laws_.count({std::min(a, b), std::max(a, b)}) > 0; }

double DragModel::coefficient(int k, int l, double t, double alpha_k, double alpha_l, double slip) const {
  if (k == l) return 0.0;
  const auto it = laws_.find({std::min(k, l), std::max(k, l)});
  if (it == laws_.end()) return 0.0;
  const double g = k < l ? it->second(t, alpha_k, alpha_l, slip) : it->second(t, alpha_l, alpha_k, slip);
  return clip_drag(g, cap_);
}

std::vector<std::pair<int, int>> DragModel::pairs() const {
  std::vector<std::pair<int, int>> out;
  for (const auto& [key, law] : laws_) out.push_back(key);
  return out;
}

double FlowProblem::rho_min() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& p : phases) r = std::min(r, p.rho);
  return r;
}

void FlowProblem::validate() const {
  if (phases.empty()) throw std::invalid_argument("need at least one phase");
  if (bcs.size() != phases.size()) throw std::invalid_argument("one velocity boundary condition per phase");
  for (const auto& p : phases) {
    if (!(p.rho > 0.0)) throw std::invalid_argument("phase density must be positive");
    if (!(p.mu >= 0.0)) throw std::invalid_argument("phase viscosity must be non-negative");
  }
  for (const auto& [a, b] : drag.pairs())
    if (b >= num_phases()) throw std::invalid_argument("drag pair refers to a missing phase");
}

Discretization::Discretization(MeshPtr mesh, int velocity_degree, int pressure_degree, int phase_degree,
                               int quad_order)
    : mesh_(std::move(mesh)) {
  velocity_ = make_space(mesh_, velocity_degree, 2);
  velocity_scalar_ = make_space(mesh_, velocity_degree, 1);
  pressure_ = make_space(mesh_, pressure_degree, 1);
  phase_ = make_space(mesh_, phase_degree, 1);
  if (quad_order < 0) quad_order = 2 * std::max({velocity_degree, pressure_degree, phase_degree}) + 2;
  qc_ = std::make_shared<QuadratureCache>(mesh_, quad_order);
  pressure_weights_ = mass_vector(*pressure_, *qc_);
  velocity_pattern_ = make_pattern(*velocity_scalar_, *velocity_scalar_);
  pressure_pattern_ = make_pattern(*pressure_, *pressure_);
}

ConstraintSet velocity_constraints(const Discretization& d, const VelocityBC& bc, double t) {
  ConstraintSet cs;
  if (!bc.dirichlet.empty()) {
    if (bc.value)
      add_dirichlet(cs, *d.velocity(), bc.dirichlet, VectorFunction([&](const Vec2& x) { return bc.value(x, t); }));
    else
      add_dirichlet(cs, *d.velocity(), bc.dirichlet, VectorFunction([](const Vec2&) { return Vec2{}; }));
  }
  if (!bc.free_slip.empty()) add_free_slip(cs, *d.velocity(), bc.free_slip);
  return cs;
}

FlowState make_initial_state(const Discretization& d, Formulation f, const std::vector<ScalarFunction>& alpha0,
                             const std::vector<VectorFunction>& u0, double t0) {
  if (alpha0.size() != u0.size()) throw std::invalid_argument("initial data for a different number of phases");
  FlowState s;
  s.t = t0;
  s.formulation = f;
  s.p = FieldVector(d.pressure());
  for (std::size_t k = 0; k < alpha0.size(); ++k) {
    PhaseState ps;
    ps.var = changed_variable_of(f, interpolate(d.phase(), alpha0[k]));
    ps.u = interpolate(d.velocity(), u0[k]);
    const auto uq = eval_vector(ps.u, d.qc());
    ps.uhat.resize(uq.size());
    for (std::size_t i = 0; i < uq.size(); ++i) ps.uhat[i] = uq[i].value;
    s.phases.push_back(std::move(ps));
  }
  return s;
}

void remove_pressure_mean(const Discretization& d, FieldVector& p) {
  const auto& w = d.pressure_weights();
  const double mean = dot(w, p.values) / std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : p.values) v -= mean;
}

}  // namespace mpfs
