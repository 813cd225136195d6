#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "mpfs/cases.hpp"
#include "mpfs/diagnostics.hpp"
#include "mpfs/fractional_step.hpp"
#include "mpfs/mesh.hpp"

using namespace mpfs;

namespace {

FlowProblem two_phase(double rho1, double rho2, Vec2 g = {}) {
  FlowProblem p;
  TimeVectorFunction gf;
  if (g.x != 0.0 || g.y != 0.0) gf = [g](const Vec2&, double) { return g; };
  p.phases = {{"a", rho1, 0.1 * rho1, gf}, {"b", rho2, 0.1 * rho2, gf}};
  p.bcs = {VelocityBC{}, VelocityBC{}};
  return p;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST(Drag, ClipDrag) {
  EXPECT_EQ(clip_drag(3.0, 1e6), 3.0);
  EXPECT_EQ(clip_drag(2e6, 1e6), 1e6);
  EXPECT_EQ(clip_drag(0.0, 1e6), 0.0);
  EXPECT_THROW(clip_drag(-1.0, 1e6), std::domain_error);
  EXPECT_THROW(clip_drag(std::numeric_limits<double>::quiet_NaN(), 1e6), std::domain_error);
}

TEST(Drag, CoefficientIsSymmetricAndClipped) {
  DragModel dm(5.0);
  dm.set(0, 1, [](double, double aa, double ab, double slip) { return 10.0 * aa + ab * slip; });
  EXPECT_DOUBLE_EQ(dm.coefficient(0, 1, 0.0, 0.2, 0.8, 1.0), 2.8);
  // the law always sees the lower-index phase first
  EXPECT_DOUBLE_EQ(dm.coefficient(1, 0, 0.0, 0.8, 0.2, 1.0), 2.8);
  EXPECT_DOUBLE_EQ(dm.coefficient(0, 1, 0.0, 0.9, 0.1, 1.0), 5.0);
  EXPECT_EQ(dm.coefficient(0, 2, 0.0, 0.5, 0.5, 1.0), 0.0);
  EXPECT_TRUE(dm.has(1, 0));
}

TEST(Scheme, QuiescentStateIsUnchanged) {
  auto mesh = build_disk(2, 4, 1.0);
  Discretization d(mesh, 2, 1, 1);
  FlowProblem p = two_phase(1.0, 3.0);
  p.drag.set(0, 1, [](double, double, double, double slip) { return 4.0 * slip; });
  p.bcs = {{{"boundary"}, {}, {}}, {{"boundary"}, {}, {}}};
  auto s = make_initial_state(d, Formulation::SqrtVariable, {[](const Vec2&) { return 0.4; }, [](const Vec2&) { return 0.6; }},
                              {[](const Vec2&) { return Vec2{}; }, [](const Vec2&) { return Vec2{}; }});
  FractionalStepScheme fs(d, p, {.tau = 0.1});
  s.p = fs.initialize_pressure(s);
  EXPECT_LT(max_abs(s.p.values), 1e-14);
  const auto var0 = s.phases[0].var.values;
  for (int i = 0; i < 3; ++i) s = fs.advance(s);
  EXPECT_LT(max_abs(s.p.values), 1e-14);
  for (int k = 0; k < 2; ++k) EXPECT_LT(max_abs(s.phases[k].u.values), 1e-14);
  for (std::size_t i = 0; i < var0.size(); ++i) EXPECT_NEAR(s.phases[0].var.values[i], var0[i], 1e-14);
}

TEST(Scheme, HydrostaticInitialPressureIsLinear) {
  auto mesh = build_rectangle(4, 8, {0.0, 1.0}, {0.0, 2.0});
  Discretization d(mesh, 2, 1, 1);
  FlowProblem p = two_phase(1.0, 3.0, {0.0, -1.0});
  auto s = make_initial_state(d, Formulation::SqrtVariable, {[](const Vec2&) { return 0.5; }, [](const Vec2&) { return 0.5; }},
                              {[](const Vec2&) { return Vec2{}; }, [](const Vec2&) { return Vec2{}; }});
  FractionalStepScheme fs(d, p, {.tau = 0.1});
  const auto p0 = fs.initialize_pressure(s);
  // c grad p = sum_k alpha_k g with c = 1/2 + 1/6
  const double slope = -1.0 / (0.5 + 0.5 / 3.0);
  const auto& pts = d.pressure()->dof_points();
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_NEAR(p0.values[i], slope * (pts[i].y - 1.0), 1e-8);
}

TEST(Scheme, UniformStateFollowsScalarMomentumUpdate) {
  auto mesh = build_rectangle(1, 1, {0.0, 1.0}, {0.0, 1.0});
  Discretization d(mesh, 2, 1, 1);
  const Vec2 g{0.0, -1.0};
  FlowProblem p = two_phase(1.0, 3.0, g);
  const double gamma = 2.0;
  p.drag.set(0, 1, [gamma](double, double, double, double) { return gamma; });
  const double alpha[2] = {0.3, 0.7};
  auto s = make_initial_state(d, Formulation::SqrtVariable,
                              {[&](const Vec2&) { return alpha[0]; }, [&](const Vec2&) { return alpha[1]; }},
                              {[](const Vec2&) { return Vec2{}; }, [](const Vec2&) { return Vec2{}; }});
  const Vec2 uh[2] = {{1.0, 2.0}, {-0.5, 0.25}};
  for (int k = 0; k < 2; ++k) std::fill(s.phases[k].uhat.begin(), s.phases[k].uhat.end(), uh[k]);
  const double tau = 0.05;
  FractionalStepScheme fs(d, p, {.tau = tau});
  const auto next = fs.advance(s);
  const auto& qc = d.qc();
  const auto pq = eval_scalar(next.p, qc);
  for (int k = 0; k < 2; ++k) {
    const double rho = p.phases[k].rho;
    const Vec2 slip = uh[k] - uh[1 - k];
    const Vec2 expected = (1.0 / alpha[k]) * (alpha[k] * uh[k] + tau * (alpha[k] * g - (gamma / rho) * slip));
    const auto uq = eval_vector(next.phases[k].u, qc);
    for (std::size_t i = 0; i < qc.size(); ++i) {
      EXPECT_NEAR(uq[i].value.x, expected.x, 1e-9);
      EXPECT_NEAR(uq[i].value.y, expected.y, 1e-9);
      // p^n = 0 and alpha unchanged: uhat = u - tau / rho grad p^{n+1}
      const Vec2 proj = uq[i].value - (tau / rho) * pq[i].grad;
      EXPECT_NEAR(next.phases[k].uhat[i].x, proj.x, 1e-12);
      EXPECT_NEAR(next.phases[k].uhat[i].y, proj.y, 1e-12);
    }
  }
}

TEST(Scheme, EqualVelocitiesCarryNoDrag) {
  auto mesh = build_rectangle(1, 1, {0.0, 1.0}, {0.0, 1.0});
  Discretization d(mesh, 2, 1, 1);
  FlowProblem with = two_phase(1.0, 3.0);
  with.drag.set(0, 1, [](double, double, double, double) { return 50.0; });
  const FlowProblem without = two_phase(1.0, 3.0);
  auto s = make_initial_state(d, Formulation::SqrtVariable, {[](const Vec2&) { return 0.3; }, [](const Vec2&) { return 0.7; }},
                              {[](const Vec2&) { return Vec2{}; }, [](const Vec2&) { return Vec2{}; }});
  for (auto& ph : s.phases) std::fill(ph.uhat.begin(), ph.uhat.end(), Vec2{0.4, -0.2});
  const auto a = FractionalStepScheme(d, with, {.tau = 0.1}).advance(s);
  const auto b = FractionalStepScheme(d, without, {.tau = 0.1}).advance(s);
  for (int k = 0; k < 2; ++k)
    for (std::size_t i = 0; i < a.phases[k].u.values.size(); ++i)
      EXPECT_EQ(a.phases[k].u.values[i], b.phases[k].u.values[i]);
}

TEST(Scheme, ProjectionIsDivergenceFreeAndMatricesAreReused) {
  auto c = make_case("disk", {.mesh_size = {4, 8}});
  Discretization d(c.mesh, c.velocity_degree, c.pressure_degree, c.phase_degree);
  auto s = make_initial_state(d, c.formulation, c.alpha0, c.u0);
  SchemeConfig cfg;
  cfg.tau = 0.1;
  FractionalStepScheme fs(d, c.problem, cfg);
  s.p = fs.initialize_pressure(s);
  for (int i = 0; i < 3; ++i) {
    LedgerEntry e;
    s = fs.advance(s, &e);
    EXPECT_LE(e.divergence_max, 10.0 * cfg.pressure_solver.rel_tol * e.divergence_scale);
  }
  EXPECT_EQ(fs.momentum_assemblies(), 3 * 2);
}

TEST(Scheme, EnergyInequalityHoldsForLargeSteps) {
  auto c = make_case("disk_energy");
  Discretization d(c.mesh, c.velocity_degree, c.pressure_degree, c.phase_degree);
  for (double tau : {0.1, 1.0}) {
    auto s = make_initial_state(d, c.formulation, c.alpha0, c.u0);
    FractionalStepScheme fs(d, c.problem, {.tau = tau});
    s.p = fs.initialize_pressure(s);
    StabilityLedger ledger(c.problem, tau);
    for (int i = 0; i < 3; ++i) {
      LedgerEntry e;
      s = fs.advance(s, &e);
      ledger.add(e);
      EXPECT_LE(e.residual(), 1e-6 * e.scale()) << "tau " << tau << " step " << e.step;
      EXPECT_GE(e.viscous, 0.0);
      EXPECT_GE(e.drag, 0.0);
    }
    EXPECT_TRUE(ledger.gronwall().holds());
  }
}

TEST(Scheme, ImplicitViscousVariantAlsoSatisfiesConstraint) {
  auto c = make_case("disk", {.mesh_size = {2, 4}});
  Discretization d(c.mesh, c.velocity_degree, c.pressure_degree, c.phase_degree);
  auto s = make_initial_state(d, c.formulation, c.alpha0, c.u0);
  SchemeConfig cfg;
  cfg.tau = 0.1;
  cfg.implicit_viscous = true;
  FractionalStepScheme fs(d, c.problem, cfg);
  s.p = fs.initialize_pressure(s);
  LedgerEntry e;
  s = fs.advance(s, &e);
  EXPECT_LE(e.divergence_max, 10.0 * cfg.pressure_solver.rel_tol * e.divergence_scale);
}

TEST(Scheme, RejectsNonPositiveStep) {
  auto c = make_case("disk", {.mesh_size = {2, 4}});
  Discretization d(c.mesh, c.velocity_degree, c.pressure_degree, c.phase_degree);
  EXPECT_THROW(FractionalStepScheme(d, c.problem, {.tau = 0.0}), std::invalid_argument);
}

TEST(Ledger, GronwallBoundUsesAccumulatedDissipation) {
  FlowProblem p = two_phase(1.0, 2.0);
  StabilityLedger ledger(p, 0.1);
  LedgerEntry e;
  e.psi_old = 1.0;
  e.psi_new = 0.8;
  e.viscous = 0.1;
  e.drag = 0.05;
  e.kinetic_old = 0.5;
  e.beta = 1.0;
  e.alpha_min = 0.5;
  ledger.add(e);
  const auto b = ledger.gronwall();
  EXPECT_DOUBLE_EQ(b.lhs, 0.95);
  const double a = std::pow(2.0 * 0.1 * 1.0, 2);
  EXPECT_NEAR(b.bound_measured, (1.0 + a * 0.5) * std::exp(a), 1e-15);
  EXPECT_TRUE(b.holds());
}
