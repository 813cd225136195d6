#include "mpfs/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mpfs {

namespace {

double domain_area(const QuadratureCache& qc) {
  return integrate(qc, [](std::size_t) { return 1.0; });
}

Mat2 fd_gradient(const TimeVectorFunction& f, const Vec2& x, double t) {
  constexpr double h = 1e-5;
  Mat2 g;
  for (int j = 0; j < 2; ++j) {
    Vec2 xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Vec2 d = (1.0 / (2.0 * h)) * (f(xp, t) - f(xm, t));
    g(0, j) = d.x;
    g(1, j) = d.y;
  }
  return g;
}

}  // namespace

double kinetic_energy(const Discretization& d, const FlowProblem& problem, const FlowState& s) {
  const auto& qc = d.qc();
  double e = 0.0;
  for (int k = 0; k < problem.num_phases(); ++k) {
    const auto a = alpha_at_qp(s.formulation, s.phases[k].var, qc);
    const auto u = eval_vector(s.phases[k].u, qc);
    e += 0.5 * problem.phases[k].rho * integrate(qc, [&](std::size_t i) { return a[i] * dot(u[i].value, u[i].value); });
  }
  return e;
}

double divergence_error(const Discretization& d, const FlowState& s, const std::vector<FieldVector>& uhat) {
  if (uhat.size() != s.phases.size()) throw std::invalid_argument("one projected velocity per phase expected");
  const auto& qc = d.qc();
  std::vector<double> div(qc.size(), 0.0);
  for (std::size_t k = 0; k < uhat.size(); ++k) {
    const auto v = eval_scalar(s.phases[k].var, qc);
    const auto u = eval_vector(uhat[k], qc);
    for (std::size_t i = 0; i < qc.size(); ++i) {
      const double a = alpha_from(s.formulation, v[i].value);
      const Vec2 ga = dalpha_dvar(s.formulation, v[i].value) * v[i].grad;
      div[i] += dot(ga, u[i].value) + a * u[i].grad.trace();
    }
  }
  return std::sqrt(integrate(qc, [&](std::size_t i) { return div[i] * div[i]; })) / domain_area(qc);
}

double partition_error(const Discretization& d, const FlowState& s) {
  const auto& qc = d.qc();
  double total = 0.0;
  for (const auto& ph : s.phases) {
    const auto a = alpha_at_qp(s.formulation, ph.var, qc);
    total += integrate(qc, [&](std::size_t i) { return a[i]; });
  }
  const double area = domain_area(qc);
  return std::abs(total - area) / area;
}

double partition_error_l1(const Discretization& d, const FlowState& s) {
  const auto& qc = d.qc();
  std::vector<double> sum(qc.size(), 0.0);
  for (const auto& ph : s.phases) {
    const auto a = alpha_at_qp(s.formulation, ph.var, qc);
    for (std::size_t i = 0; i < qc.size(); ++i) sum[i] += a[i];
  }
  return integrate(qc, [&](std::size_t i) { return std::abs(sum[i] - 1.0); }) / domain_area(qc);
}

double alpha_min_nodal(const FlowState& s) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < s.phases.size(); ++k)
    for (double v : s.phases[k].var.values) m = std::min(m, alpha_from(s.formulation, v));
  return m;
}

double alpha_max_nodal(const FlowState& s) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < s.phases.size(); ++k)
    for (double v : s.phases[k].var.values) m = std::max(m, alpha_from(s.formulation, v));
  return m;
}

ErrorReport manufactured_errors(const Discretization& d, const FlowState& s, const ExactSolution& exact,
                                const std::vector<FieldVector>& uhat) {
  if (s.phases.size() < 2 || exact.u.size() < 2) throw std::invalid_argument("errors need two phases");
  const auto& qc = d.qc();
  const auto& w = d.pressure_weights();
  double wsum = 0.0, pmean = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    wsum += w[i];
    pmean += w[i] * s.p[i];
  }
  pmean /= wsum;
  const auto pq = eval_scalar(s.p, qc);
  const auto u1 = eval_vector(s.phases[0].u, qc);
  const auto u2 = eval_vector(s.phases[1].u, qc);
  double ep = 0.0, pn = 0.0, eu = 0.0, un = 0.0;
  const TimeVectorFunction ur = [&](const Vec2& x, double t) { return exact.u[1](x, t) - exact.u[0](x, t); };
  for (std::size_t i = 0; i < qc.size(); ++i) {
    const Vec2 x = qc.point(i);
    const double pe = exact.p(x, s.t);
    ep += qc.jxw(i) * std::pow(pq[i].value - pmean - pe, 2);
    pn += qc.jxw(i) * pe * pe;
    const Mat2 ge = fd_gradient(ur, x, s.t);
    const Mat2 diff = (u2[i].grad - u1[i].grad) - ge;
    eu += qc.jxw(i) * contract(diff, diff);
    un += qc.jxw(i) * contract(ge, ge);
  }
  ErrorReport r;
  r.e_p = pn > 0.0 ? std::sqrt(ep / pn) : std::sqrt(ep);
  r.e_u = un > 0.0 ? std::sqrt(eu / un) : std::sqrt(eu);
  r.e_div = divergence_error(d, s, uhat);
  r.e_alpha = partition_error(d, s);
  return r;
}

double fit_order(const std::vector<double>& tau, const std::vector<double>& error, int last) {
  if (tau.size() != error.size()) throw std::invalid_argument("fit_order needs matching arrays");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < tau.size(); ++i)
    if (tau[i] > 0.0 && error[i] > 0.0) pts.emplace_back(tau[i], error[i]);
  std::sort(pts.begin(), pts.end());
  if (last > 0 && static_cast<int>(pts.size()) > last) pts.resize(last);
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(pts.size());
  for (const auto& [t, e] : pts) {
    const double x = std::log(t), y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

LedgerSummary ledger_report(const StabilityLedger& ledger, double slack) {
  LedgerSummary s;
  s.steps = static_cast<int>(ledger.entries().size());
  s.worst_relative_residual = ledger.worst_relative_residual();
  for (const auto& e : ledger.entries())
    if (!(e.residual() <= slack * e.scale())) s.violations.push_back(e.step);
  s.bound = ledger.gronwall();
  return s;
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

void write_timeseries_header(std::ostream& os) { os << "t,E_kinetic,e_div,partition,alpha_min,psi_total,ineq_residual\n"; }

void write_timeseries_row(std::ostream& os, const TimeseriesRow& r) {
  os << format_double(r.t) << ',' << format_double(r.e_kinetic) << ',' << format_double(r.e_div) << ','
     << format_double(r.partition) << ',' << format_double(r.alpha_min) << ',' << format_double(r.psi_total) << ','
     << format_double(r.ineq_residual) << '\n';
}

void write_ledger_header(std::ostream& os) {
  os << "step,t,psi_old,psi_new,viscous,drag,kinetic_old,beta,growth,residual,scale,alpha_min,divergence_max,"
        "divergence_scale\n";
}

void write_ledger_row(std::ostream& os, const LedgerEntry& e) {
  os << e.step << ',' << format_double(e.t) << ',' << format_double(e.psi_old) << ',' << format_double(e.psi_new)
     << ',' << format_double(e.viscous) << ',' << format_double(e.drag) << ',' << format_double(e.kinetic_old) << ','
     << format_double(e.beta) << ',' << format_double(e.growth) << ',' << format_double(e.residual()) << ','
     << format_double(e.scale()) << ',' << format_double(e.alpha_min) << ',' << format_double(e.divergence_max)
     << ',' << format_double(e.divergence_scale) << '\n';
}

}  // namespace mpfs
