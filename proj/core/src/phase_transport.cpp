#include "mpfs/phase_transport.hpp"

#include <cmath>
#include <stdexcept>

#include "mpfs/assembly.hpp"

namespace mpfs {

std::string to_string(Formulation f) {
  switch (f) {
    case Formulation::SqrtVariable: return "sqrt_variable";
    case Formulation::BoundedVariable: return "bounded_variable";
    case Formulation::Raw: return "raw";
  }
  return "unknown";
}

Formulation formulation_from_string(const std::string& s) {
  if (s == "sqrt_variable" || s == "sqrt") return Formulation::SqrtVariable;
  if (s == "bounded_variable" || s == "bounded") return Formulation::BoundedVariable;
  if (s == "raw") return Formulation::Raw;
  throw std::invalid_argument("unknown transport formulation '" + s + "' (sqrt_variable, bounded_variable, raw)");
}

double alpha_from(Formulation f, double v) {
  switch (f) {
    case Formulation::SqrtVariable: return v * v;
    case Formulation::BoundedVariable: {
      const double s = v / (1.0 + std::abs(v));
      return s * s;
    }
    case Formulation::Raw: return v;
  }
  return v;
}

double dalpha_dvar(Formulation f, double v) {
  switch (f) {
    case Formulation::SqrtVariable: return 2.0 * v;
    case Formulation::BoundedVariable: {
      const double d = 1.0 + std::abs(v);
      return 2.0 * v / (d * d * d);
    }
    case Formulation::Raw: return 1.0;
  }
  return 1.0;
}

double var_from_alpha(Formulation f, double a) {
  switch (f) {
    case Formulation::SqrtVariable:
      if (a < 0.0) throw std::domain_error("negative volume fraction " + std::to_string(a));
      return std::sqrt(a);
    case Formulation::BoundedVariable: {
      if (a < 0.0 || a >= 1.0) throw std::domain_error("bounded variable needs alpha in [0, 1), got " + std::to_string(a));
      const double s = std::sqrt(a);
      return s / (1.0 - s);
    }
    case Formulation::Raw: return a;
  }
  return a;
}

FieldVector alpha_of(Formulation f, const FieldVector& var) {
  FieldVector out(var.space);
  for (std::size_t i = 0; i < var.size(); ++i) out[i] = alpha_from(f, var[i]);
  return out;
}

FieldVector changed_variable_of(Formulation f, const FieldVector& alpha) {
  FieldVector out(alpha.space);
  for (std::size_t i = 0; i < alpha.size(); ++i) out[i] = var_from_alpha(f, alpha[i]);
  return out;
}

std::vector<double> alpha_at_qp(Formulation f, const FieldVector& var, const QuadratureCache& qc) {
  const auto v = eval_scalar(var, qc);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = alpha_from(f, v[i].value);
  return out;
}

namespace {

struct Advection {
  std::vector<Vec2> w;
  std::vector<double> c;
};

Advection advection_data(const FieldVector& var_old, const FieldVector& u, Formulation f, const QuadratureCache& qc) {
  if (u.space->components() != 2) throw std::invalid_argument("transport velocity must be a vector field");
  if (u.space->mesh_ptr() != var_old.space->mesh_ptr()) throw std::invalid_argument("velocity and phase live on different meshes");
  const auto uq = eval_vector(u, qc);
  Advection a;
  a.w.resize(uq.size());
  a.c.resize(uq.size());
  std::vector<ScalarQP> old;
  if (f == Formulation::BoundedVariable) old = eval_scalar(var_old, qc);
  for (std::size_t i = 0; i < uq.size(); ++i) {
    a.w[i] = uq[i].value;
    const double div = uq[i].grad.trace();
    switch (f) {
      case Formulation::SqrtVariable: a.c[i] = 0.5 * div; break;
      case Formulation::BoundedVariable: a.c[i] = 0.5 * div * (1.0 + std::abs(old[i].value)); break;
      case Formulation::Raw: a.c[i] = div; break;
    }
  }
  return a;
}

}  // namespace

FieldVector transport_step(const FieldVector& var_old, const FieldVector& u, double tau, const TransportConfig& cfg,
                           const QuadratureCache& qc, SolveStats* stats) {
  if (!(tau > 0.0)) throw std::invalid_argument("time step must be positive");
  if (cfg.chi != 0 && cfg.chi != 1) throw std::invalid_argument("chi must be 0 or 1");
  if (var_old.space->components() != 1) throw std::invalid_argument("phase variable must be scalar");
  const Space& z = *var_old.space;
  const Advection adv = advection_data(var_old, u, cfg.formulation, qc);
  const double ct = cfg.chi * tau;
  // scaled by tau^2: <z + tau L z, zeta + chi tau L zeta> = <z_old, zeta + chi tau L zeta>
  const SparseMatrix a = assemble_matrix(z, z, qc, [&](const QuadPoint& qp) {
    const Vec2 w = adv.w[qp.index];
    const double c = adv.c[qp.index];
    return [w, c, tau, ct](const Shape& t, const Shape& s) {
      const double lt = dot(w, t.grad) + c * t.value;
      const double ls = dot(w, s.grad) + c * s.value;
      return (t.value + tau * lt) * (s.value + ct * ls);
    };
  });
  const auto old = eval_scalar(var_old, qc);
  const std::vector<double> b = assemble_vector(z, qc, [&](const QuadPoint& qp) {
    const Vec2 w = adv.w[qp.index];
    const double c = adv.c[qp.index];
    const double zo = old[qp.index].value;
    return [w, c, zo, ct](const Shape& s) { return zo * (s.value + ct * (dot(w, s.grad) + c * s.value)); };
  });
  FieldVector out(var_old.space);
  out.values = cfg.chi == 1 ? solve_spd(a, b, cfg.solver, stats, var_old.values)
                            : solve_nonsymmetric(a, b, cfg.solver, stats, var_old.values);
  return out;
}

TransportBalance sqrt_transport_balance(const FieldVector& var_old, const FieldVector& var_new, const FieldVector& u,
                                        double tau, const QuadratureCache& qc) {
  const Advection adv = advection_data(var_old, u, Formulation::SqrtVariable, qc);
  const auto zo = eval_scalar(var_old, qc);
  const auto zn = eval_scalar(var_new, qc);
  TransportBalance tb;
  for (std::size_t i = 0; i < qc.size(); ++i) {
    const double w = qc.jxw(i);
    const double l = dot(adv.w[i], zn[i].grad) + adv.c[i] * zn[i].value;
    const double inc = zn[i].value - zo[i].value + tau * l;
    tb.norm_new_sq += w * zn[i].value * zn[i].value;
    tb.norm_old_sq += w * zo[i].value * zo[i].value;
    tb.increment_sq += w * inc * inc;
    tb.operator_sq += w * tau * tau * l * l;
  }
  return tb;
}

}  // namespace mpfs
