#include "mpfs/fractional_step.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mpfs/assembly.hpp"
#include "mpfs/log.hpp"

namespace mpfs {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double ratio(double gamma, double denom) {
  if (gamma == 0.0) return 0.0;
  return denom > 0.0 ? gamma / denom : inf;
}

double sqrt_prod(double a, double b) { return std::sqrt(std::max(a, 0.0) * std::max(b, 0.0)); }

double sqrt_pos(double a) { return std::sqrt(std::max(a, 0.0)); }

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::vector<Vec2> gravity_at_qp(const PhaseParams& ph, const QuadratureCache& qc, double t) {
  std::vector<Vec2> g(qc.size());
  if (ph.g)
    for (std::size_t i = 0; i < qc.size(); ++i) g[i] = ph.g(qc.point(i), t);
  return g;
}

}  // namespace

struct FractionalStepScheme::Levels {
  std::vector<std::vector<double>> a0, a1;
  std::vector<std::vector<VectorQP>> u_old;
  std::vector<ScalarQP> p_old;
};

struct FractionalStepScheme::DragTerms {
  std::vector<std::vector<Vec2>> force;  ///< sum_l gamma_kl (uhat_k - uhat_l) per phase
  double dissipation = 0.0;              ///< sum_k sum_l int gamma_kl |uhat_k - uhat_l|^2
  double beta = 0.0;
};

void StabilityLedger::add(const LedgerEntry& e) { entries_.push_back(e); }

double StabilityLedger::worst_relative_residual() const {
  double w = -inf;
  for (const auto& e : entries_) w = std::max(w, e.scale() > 0.0 ? e.residual() / e.scale() : e.residual());
  return w;
}

StabilityLedger::Bound StabilityLedger::gronwall() const {
  Bound b;
  if (entries_.empty()) return b;
  const int m = problem_->num_phases();
  const double n = static_cast<double>(entries_.size());
  double dissipation = 0.0;
  b.alpha_min = inf;
  for (const auto& e : entries_) {
    dissipation += e.viscous + e.drag;
    b.beta_max = std::max(b.beta_max, e.beta);
    b.alpha_min = std::min(b.alpha_min, e.alpha_min);
  }
  b.lhs = entries_.back().psi_new + dissipation;
  const double psi0 = entries_.front().psi_old;
  const double k0 = entries_.front().kinetic_old;
  auto bound = [&](double beta) {
    const double a = std::pow(2.0 * tau_ * (m - 1) * beta, 2);
    if (!std::isfinite(a)) return inf;
    return (psi0 + a * k0) * std::exp(a * n);
  };
  b.bound_measured = bound(b.beta_max);
  b.bound_cap = bound(b.alpha_min > 0.0 ? problem_->drag.cap() / (problem_->rho_min() * b.alpha_min) : inf);
  return b;
}

FractionalStepScheme::FractionalStepScheme(const Discretization& d, const FlowProblem& problem, SchemeConfig cfg)
    : d_(&d), problem_(&problem), cfg_(std::move(cfg)) {
  problem.validate();
  if (!(cfg_.tau > 0.0)) throw std::invalid_argument("time step must be positive");
}

std::vector<double> FractionalStepScheme::psi(const FlowState& s) const {
  const auto& qc = d_->qc();
  const auto pq = eval_scalar(s.p, qc);
  std::vector<double> out;
  for (int k = 0; k < problem_->num_phases(); ++k) {
    const auto& ph = problem_->phases[k];
    const auto a = alpha_at_qp(s.formulation, s.phases[k].var, qc);
    const auto uq = eval_vector(s.phases[k].u, qc);
    const auto& uh = s.phases[k].uhat;
    const double tau = cfg_.tau;
    out.push_back(integrate(qc, [&](std::size_t i) {
      return a[i] * (ph.rho * dot(uh[i], uh[i]) + tau * ph.mu * contract(uq[i].grad, uq[i].grad) +
                     tau * tau / ph.rho * dot(pq[i].grad, pq[i].grad));
    }));
  }
  return out;
}

FieldVector FractionalStepScheme::initialize_pressure(const FlowState& s) const {
  const auto& qc = d_->qc();
  const int m = problem_->num_phases();
  std::vector<std::vector<double>> a(m);
  std::vector<std::vector<Vec2>> grad_a(m);
  std::vector<std::vector<VectorQP>> uq(m);
  for (int k = 0; k < m; ++k) {
    const auto v = eval_scalar(s.phases[k].var, qc);
    a[k].resize(v.size());
    grad_a[k].resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      a[k][i] = alpha_from(s.formulation, v[i].value);
      grad_a[k][i] = dalpha_dvar(s.formulation, v[i].value) * v[i].grad;
    }
    uq[k] = eval_vector(s.phases[k].u, qc);
  }
  std::vector<Vec2> f(qc.size());
  std::vector<double> c(qc.size(), 0.0);
  for (int k = 0; k < m; ++k) {
    const auto& ph = problem_->phases[k];
    const double nu = ph.mu / ph.rho;
    const auto hess = eval_vector_hessian(s.phases[k].u, qc);
    const auto g = gravity_at_qp(ph, qc, s.t);
    for (std::size_t i = 0; i < qc.size(); ++i) {
      const Vec2 u = uq[k][i].value;
      const Mat2& gu = uq[k][i].grad;
      const double div = gu.trace();
      const Vec2 ga = grad_a[k][i];
      const double al = a[k][i];
      // div(alpha u (x) u)
      const Vec2 conv = dot(u, ga) * u + al * div * u + al * (gu * u);
      // div(2 nu alpha sym grad u) = 2 nu [(sym grad u) grad alpha + alpha (lap u + grad div u) / 2]
      const Mat2 sym = 0.5 * (gu + gu.transpose());
      const auto& h = hess[i];
      const Vec2 lap{h[0].xx + h[0].yy, h[1].xx + h[1].yy};
      const Vec2 grad_div{h[0].xx + h[1].xy, h[0].xy + h[1].yy};
      const Vec2 visc = 2.0 * nu * (sym * ga + 0.5 * al * (lap + grad_div));
      Vec2 drag;
      for (int l = 0; l < m; ++l) {
        if (l == k) continue;
        const Vec2 du = u - uq[l][i].value;
        drag += problem_->drag.coefficient(k, l, s.t, al, a[l][i], norm(du)) * du;
      }
      f[i] += -1.0 * conv + visc + al * g[i] - (1.0 / ph.rho) * drag;
      c[i] += al / ph.rho;
    }
  }
  const Space& ps = *d_->pressure();
  const SparseMatrix lap = assemble_matrix(
      ps, ps, qc,
      [&](const QuadPoint& qp) {
        const double ci = c[qp.index];
        return [ci](const Shape& t, const Shape& v) { return ci * dot(t.grad, v.grad); };
      },
      &d_->pressure_pattern());
  const auto b = assemble_vector(ps, qc, [&](const QuadPoint& qp) {
    const Vec2 fi = f[qp.index];
    return [fi](const Shape& v) { return dot(fi, v.grad); };
  });
  FieldVector p(d_->pressure());
  p.values = solve_singular_neumann(lap, b, d_->pressure_weights(), cfg_.pressure_solver);
  return p;
}

FractionalStepScheme::DragTerms FractionalStepScheme::drag_terms(const FlowState& s, const Levels& lv) const {
  const auto& qc = d_->qc();
  const int m = problem_->num_phases();
  DragTerms dt;
  dt.force.assign(m, std::vector<Vec2>(qc.size()));
  for (const auto& [a, b] : problem_->drag.pairs()) {
    const double ra = problem_->phases[a].rho;
    const double rb = problem_->phases[b].rho;
    const auto& ua = s.phases[a].uhat;
    const auto& ub = s.phases[b].uhat;
    for (std::size_t i = 0; i < qc.size(); ++i) {
      const Vec2 du = ua[i] - ub[i];
      const double slip = norm(du);
      const double aa = lv.a0[a][i];
      const double ab = lv.a0[b][i];
      const double g = problem_->drag.coefficient(a, b, s.t, aa, ab, slip);
      dt.force[a][i] += g * du;
      dt.force[b][i] -= g * du;
      dt.dissipation += 2.0 * qc.jxw(i) * g * slip * slip;
      dt.beta = std::max({dt.beta, ratio(g, ra * aa), ratio(g, rb * ab), ratio(g, std::sqrt(ra * rb) * sqrt_prod(aa, ab))});
    }
  }
  return dt;
}

FieldVector FractionalStepScheme::momentum_step(const FlowState& s, int k, const Levels& lv, const DragTerms& drag,
                                                double t_new, std::vector<SolveStats>* stats) const {
  const auto& qc = d_->qc();
  const auto& ph = problem_->phases[k];
  const double rho = ph.rho;
  const double mu = ph.mu;
  const double tau = cfg_.tau;
  const auto& a0 = lv.a0[k];
  const auto& a1 = lv.a1[k];
  const auto& uo = lv.u_old[k];
  const auto& po = lv.p_old;
  const auto& uh = s.phases[k].uhat;
  const auto& force = drag.force[k];
  const auto g = gravity_at_qp(ph, qc, t_new);
  const bool implicit = cfg_.implicit_viscous;

  const auto b = assemble_vector(*d_->velocity(), qc, [&](const QuadPoint& qp) {
    const std::size_t i = qp.index;
    const double sq = sqrt_prod(a0[i], a1[i]);
    Vec2 mass = (rho * a0[i] / tau) * uh[i] - sq * po[i].grad + (rho * a1[i]) * g[i] - force[i];
    const Mat2 gu = uo[i].grad;
    const double visc = implicit ? 0.0 : mu * sq;
    return [mass, gu, visc](const Shape& v) {
      const int c = v.comp;
      // <grad^T u, grad v> for v = psi e_c is (d_c u) . grad psi
      const Vec2 dcu{gu(0, c), gu(1, c)};
      return mass[c] * v.value - visc * dot(dcu, v.grad);
    };
  });

  auto scalar_kernel = [&](const QuadPoint& qp) {
    const std::size_t i = qp.index;
    const double m = rho * (a0[i] + a1[i]) / (2.0 * tau);
    const Vec2 cw = (0.5 * rho * a1[i]) * uo[i].value;
    const double d = mu * a1[i];
    return [m, cw, d](const Shape& t, const Shape& v) {
      // skew form of the convection term
      return m * t.value * v.value + dot(cw, t.grad) * v.value - dot(cw, v.grad) * t.value + d * dot(t.grad, v.grad);
    };
  };

  const ConstraintSet cs = velocity_constraints(*d_, problem_->bcs[k], t_new);
  FieldVector u(d_->velocity());
  ++momentum_assemblies_;
  if (!implicit) {
    const SparseMatrix kmat = assemble_matrix(*d_->velocity_scalar(), *d_->velocity_scalar(), qc, scalar_kernel,
                                              &d_->velocity_pattern());
    const int n = d_->velocity_scalar()->num_dofs();
    for (int c = 0; c < 2; ++c) {
      SparseMatrix kc = kmat;
      std::vector<double> bc(b.begin() + static_cast<std::ptrdiff_t>(c) * n,
                             b.begin() + static_cast<std::ptrdiff_t>(c + 1) * n);
      apply_constraints(kc, bc, component_constraints(cs, c, n));
      SolveStats st;
      const auto x = solve_nonsymmetric(kc, bc, cfg_.momentum_solver, &st, s.phases[k].u.component(c));
      std::copy(x.begin(), x.end(), u.component(c).begin());
      if (stats) stats->push_back(st);
    }
    return u;
  }
  SparseMatrix kmat = assemble_matrix(*d_->velocity(), *d_->velocity(), qc, [&](const QuadPoint& qp) {
    auto inner = scalar_kernel(qp);
    const double d = mu * a1[qp.index];
    return [inner, d](const Shape& t, const Shape& v) {
      const double same = t.comp == v.comp ? inner(t, v) : 0.0;
      return same + d * t.grad[v.comp] * v.grad[t.comp];
    };
  });
  std::vector<double> bb = b;
  apply_constraints(kmat, bb, cs);
  SolveStats st;
  u.values = solve_nonsymmetric(kmat, bb, cfg_.momentum_solver, &st, s.phases[k].u.values);
  if (stats) stats->push_back(st);
  return u;
}

FieldVector FractionalStepScheme::pressure_step(const FlowState& s, const std::vector<FieldVector>& u_new,
                                                const Levels& lv, SolveStats* stats, double* rhs_norm) const {
  const auto& qc = d_->qc();
  const int m = problem_->num_phases();
  const double tau = cfg_.tau;
  std::vector<double> c1(qc.size(), 0.0);
  std::vector<Vec2> flux(qc.size());
  for (int k = 0; k < m; ++k) {
    const double rho = problem_->phases[k].rho;
    const auto uq = eval_vector(u_new[k], qc);
    for (std::size_t i = 0; i < qc.size(); ++i) {
      const double a0 = lv.a0[k][i];
      const double a1 = lv.a1[k][i];
      c1[i] += a1 / rho;
      flux[i] += (sqrt_prod(a0, a1) / rho) * lv.p_old[i].grad + (a1 / tau) * uq[i].value;
    }
  }
  const Space& ps = *d_->pressure();
  const SparseMatrix a = assemble_matrix(
      ps, ps, qc,
      [&](const QuadPoint& qp) {
        const double c = c1[qp.index];
        return [c](const Shape& t, const Shape& v) { return c * dot(t.grad, v.grad); };
      },
      &d_->pressure_pattern());
  const auto b = assemble_vector(ps, qc, [&](const QuadPoint& qp) {
    const Vec2 fl = flux[qp.index];
    return [fl](const Shape& v) { return dot(fl, v.grad); };
  });
  if (rhs_norm) *rhs_norm = norm2(b);
  FieldVector p(d_->pressure());
  p.values = solve_singular_neumann(a, b, d_->pressure_weights(), cfg_.pressure_solver, stats, s.p.values);
  return p;
}

std::vector<Vec2> FractionalStepScheme::projection_step(const FlowState&, int k, const FieldVector& u_new,
                                                        const FieldVector& p_new, const Levels& lv) const {
  const auto& qc = d_->qc();
  const double c = cfg_.tau / problem_->phases[k].rho;
  const auto uq = eval_vector(u_new, qc);
  const auto pq = eval_scalar(p_new, qc);
  std::vector<Vec2> out(qc.size());
  for (std::size_t i = 0; i < qc.size(); ++i) {
    const double a0 = lv.a0[k][i];
    const double a1 = lv.a1[k][i];
    if (!(a1 > 0.0)) {
      std::ostringstream msg;
      msg << "volume fraction of phase " << problem_->phases[k].name << " vanishes at (" << qc.point(i).x << ", "
          << qc.point(i).y << "); the projected velocity is undefined";
      throw std::runtime_error(msg.str());
    }
    out[i] = uq[i].value + c * (sqrt_pos(a0 / a1) * lv.p_old[i].grad - pq[i].grad);
  }
  return out;
}

FlowState FractionalStepScheme::advance(const FlowState& s, LedgerEntry* ledger, StepStats* stats) const {
  const int m = problem_->num_phases();
  if (static_cast<int>(s.phases.size()) != m) throw std::invalid_argument("state has the wrong number of phases");
  const auto& qc = d_->qc();
  const double tau = cfg_.tau;
  const double t_new = s.t + tau;
  TransportConfig tcfg = cfg_.transport;
  tcfg.formulation = s.formulation;

  Levels lv;
  lv.a0.resize(m);
  lv.a1.resize(m);
  lv.u_old.resize(m);
  lv.p_old = eval_scalar(s.p, qc);
  FlowState next;
  next.t = t_new;
  next.step = s.step + 1;
  next.formulation = s.formulation;
  next.phases.resize(m);
  if (stats) *stats = {};

  double alpha_min = inf;
  for (int k = 0; k < m; ++k) {
    SolveStats st;
    next.phases[k].var = transport_step(s.phases[k].var, s.phases[k].u, tau, tcfg, qc, &st);
    if (stats) stats->transport.push_back(st);
    lv.a0[k] = alpha_at_qp(s.formulation, s.phases[k].var, qc);
    lv.a1[k] = alpha_at_qp(s.formulation, next.phases[k].var, qc);
    lv.u_old[k] = eval_vector(s.phases[k].u, qc);
    for (std::size_t i = 0; i < qc.size(); ++i) alpha_min = std::min({alpha_min, lv.a0[k][i], lv.a1[k][i]});
  }
  double alpha_min_dof = inf;
  for (int k = 0; k < m; ++k)
    for (double v : next.phases[k].var.values) alpha_min_dof = std::min(alpha_min_dof, alpha_from(s.formulation, v));
  if (std::min(alpha_min, alpha_min_dof) < cfg_.alpha_warn) {
    std::ostringstream msg;
    msg << "step " << next.step << ": volume fraction " << std::min(alpha_min, alpha_min_dof) << " is below "
        << cfg_.alpha_warn;
    warn(msg.str());
  }

  const DragTerms drag = drag_terms(s, lv);
  std::vector<FieldVector> u_new(m);
  for (int k = 0; k < m; ++k)
    u_new[k] = momentum_step(s, k, lv, drag, t_new, stats ? &stats->momentum : nullptr);

  double rhs_norm = 0.0;
  next.p = pressure_step(s, u_new, lv, stats ? &stats->pressure : nullptr, &rhs_norm);
  for (int k = 0; k < m; ++k) {
    next.phases[k].uhat = projection_step(s, k, u_new[k], next.p, lv);
    next.phases[k].u = std::move(u_new[k]);
  }
  bool finite = all_finite(next.p.values);
  for (const auto& ph : next.phases) finite = finite && all_finite(ph.var.values) && all_finite(ph.u.values);
  if (!finite) throw std::runtime_error("non-finite values at step " + std::to_string(next.step));

  if (ledger) {
    LedgerEntry e;
    e.step = next.step;
    e.t = t_new;
    const auto po = psi(s);
    e.psi = psi(next);
    for (double v : po) e.psi_old += v;
    for (double v : e.psi) e.psi_new += v;
    for (int k = 0; k < m; ++k) {
      const auto& ph = problem_->phases[k];
      const auto un = eval_vector(next.phases[k].u, qc);
      const auto& uh = s.phases[k].uhat;
      e.kinetic_old += ph.rho * integrate(qc, [&](std::size_t i) { return lv.a0[k][i] * dot(uh[i], uh[i]); });
      e.viscous += tau * ph.mu * integrate(qc, [&](std::size_t i) {
                     const Mat2 v = sqrt_pos(lv.a1[k][i]) * un[i].grad +
                                    sqrt_pos(lv.a0[k][i]) * lv.u_old[k][i].grad.transpose();
                     return contract(v, v);
                   });
    }
    e.drag = tau * drag.dissipation;
    e.beta = drag.beta;
    e.growth = std::isfinite(e.beta) ? std::pow(2.0 * tau * (m - 1) * e.beta, 2) * e.kinetic_old : inf;
    e.alpha_min = alpha_min;
    std::vector<Vec2> div_flux(qc.size());
    for (int k = 0; k < m; ++k)
      for (std::size_t i = 0; i < qc.size(); ++i) div_flux[i] += lv.a1[k][i] * next.phases[k].uhat[i];
    const auto d = assemble_vector(*d_->pressure(), qc, [&](const QuadPoint& qp) {
      const Vec2 fl = div_flux[qp.index];
      return [fl](const Shape& v) { return dot(fl, v.grad); };
    });
    e.divergence_max = norm_inf(d);
    e.divergence_scale = tau * rhs_norm;
    *ledger = e;
  }
  return next;
}

FieldVector FractionalStepScheme::projected_velocity_field(const FlowState& s, int k) const {
  const auto& qc = d_->qc();
  const auto a = alpha_at_qp(s.formulation, s.phases[k].var, qc);
  const auto& uh = s.phases[k].uhat;
  const Space& v = *d_->velocity();
  // floor keeps the weighted mass matrix definite where a phase is absent
  const SparseMatrix mass = assemble_matrix(v, v, qc, [&](const QuadPoint& qp) {
    const double w = std::max(a[qp.index], 1e-12);
    return [w](const Shape& t, const Shape& s2) { return t.comp == s2.comp ? w * t.value * s2.value : 0.0; };
  });
  const auto b = assemble_vector(v, qc, [&](const QuadPoint& qp) {
    const Vec2 f = std::max(a[qp.index], 1e-12) * uh[qp.index];
    return [f](const Shape& s2) { return f[s2.comp] * s2.value; };
  });
  FieldVector out(d_->velocity());
  out.values = solve_spd(mass, b, {1e-12, 1e-30, 20000, Preconditioner::Diagonal, 60}, nullptr, s.phases[k].u.values);
  return out;
}

}  // namespace mpfs
