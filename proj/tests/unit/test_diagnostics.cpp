#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mpfs/cases.hpp"
#include "mpfs/diagnostics.hpp"
#include "mpfs/mesh.hpp"

using namespace mpfs;

namespace {

FlowState uniform_state(const Discretization& d, double a1, double a2, Vec2 u1, Vec2 u2) {
  return make_initial_state(d, Formulation::SqrtVariable, {[a1](const Vec2&) { return a1; }, [a2](const Vec2&) { return a2; }},
                            {[u1](const Vec2&) { return u1; }, [u2](const Vec2&) { return u2; }});
}

FlowProblem unit_density() {
  FlowProblem p;
  p.phases = {{"a", 1.0, 1.0, {}}, {"b", 1.0, 1.0, {}}};
  p.bcs = {VelocityBC{}, VelocityBC{}};
  return p;
}

}  // namespace

TEST(Diagnostics, KineticEnergyClosedForm) {
  Discretization d(build_rectangle(2, 2, {0.0, 1.0}, {0.0, 1.0}), 2, 1, 1);
  const auto p = unit_density();
  EXPECT_NEAR(kinetic_energy(d, p, uniform_state(d, 0.5, 0.5, {1.0, 0.0}, {})), 0.25, 1e-14);
  EXPECT_EQ(kinetic_energy(d, p, uniform_state(d, 0.5, 0.5, {}, {})), 0.0);
}

TEST(Diagnostics, KineticEnergyMatchesIndependentQuadrature) {
  // brute-force midpoint sum on a fine grid as the second quadrature path
  Discretization d(build_rectangle(3, 3, {0.0, 1.0}, {0.0, 1.0}), 2, 1, 1);
  FlowProblem p = unit_density();
  p.phases[1].rho = 2.0;
  auto a1 = [](const Vec2& x) { return 0.2 + 0.1 * x.x; };
  auto u1 = [](const Vec2& x) { return Vec2{x.x, 1.0 - x.y}; };
  auto u2 = [](const Vec2& x) { return Vec2{x.y, 0.5}; };
  auto s = make_initial_state(d, Formulation::Raw, {a1, [&](const Vec2& x) { return 1.0 - a1(x); }}, {u1, u2});
  double ref = 0.0;
  const int n = 600;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 x{(i + 0.5) / n, (j + 0.5) / n};
      ref += (0.5 * a1(x) * dot(u1(x), u1(x)) + (1.0 - a1(x)) * dot(u2(x), u2(x))) / (n * n);
    }
  EXPECT_NEAR(kinetic_energy(d, p, s), ref, 1e-6);
}

TEST(Diagnostics, PartitionError) {
  Discretization d(build_rectangle(2, 2, {0.0, 1.0}, {0.0, 1.0}), 2, 1, 1);
  EXPECT_NEAR(partition_error(d, uniform_state(d, 0.6, 0.6, {}, {})), 0.2, 1e-14);
  EXPECT_NEAR(partition_error(d, uniform_state(d, 0.5, 0.5, {}, {})), 0.0, 1e-15);
  auto s = make_initial_state(d, Formulation::SqrtVariable,
                              {[](const Vec2& x) { return 0.3 + 0.1 * x.x; }, [](const Vec2& x) { return 0.8 - 0.1 * x.x; }},
                              {[](const Vec2&) { return Vec2{}; }, [](const Vec2&) { return Vec2{}; }});
  EXPECT_NEAR(partition_error(d, s), partition_error_l1(d, s), 1e-14);
}

TEST(Diagnostics, RigidRotationIsDivergenceFree) {
  Discretization d(build_disk(2, 4, 1.0), 2, 1, 1);
  auto rot = [](const Vec2& x) { return Vec2{-x.y, x.x}; };
  auto s = make_initial_state(d, Formulation::SqrtVariable, {[](const Vec2&) { return 0.5; }, [](const Vec2&) { return 0.5; }},
                              {rot, rot});
  EXPECT_LT(divergence_error(d, s, {s.phases[0].u, s.phases[1].u}), 1e-13);
  FieldVector zero(d.velocity());
  EXPECT_EQ(divergence_error(d, s, {zero, zero}), 0.0);
}

TEST(Diagnostics, ManufacturedErrorsOfInterpolatedAndScaledFields) {
  Discretization d(build_rectangle(3, 3, {0.0, 1.0}, {0.0, 1.0}), 2, 1, 1);
  ExactSolution ex;
  ex.u = {[](const Vec2& x, double) { return Vec2{x.y, -x.x}; }, [](const Vec2& x, double) { return Vec2{2.0 * x.x, x.y}; }};
  ex.alpha = {[](const Vec2&, double) { return 0.5; }, [](const Vec2&, double) { return 0.5; }};
  ex.p = [](const Vec2& x, double) { return x.x + x.y - 1.0; };
  auto s = make_initial_state(d, Formulation::SqrtVariable, {[](const Vec2&) { return 0.5; }, [](const Vec2&) { return 0.5; }},
                              {[&](const Vec2& x) { return ex.u[0](x, 0.0); }, [&](const Vec2& x) { return ex.u[1](x, 0.0); }});
  s.p = interpolate(d.pressure(), [&](const Vec2& x) { return ex.p(x, 0.0); });
  auto r = manufactured_errors(d, s, ex, {s.phases[0].u, s.phases[1].u});
  EXPECT_LT(r.e_p, 1e-12);
  EXPECT_LT(r.e_u, 1e-9);
  EXPECT_LT(r.e_alpha, 1e-14);
  for (auto& v : s.p.values) v *= 2.0;
  r = manufactured_errors(d, s, ex, {s.phases[0].u, s.phases[1].u});
  EXPECT_NEAR(r.e_p, 1.0, 1e-12);
}

TEST(Diagnostics, FitOrder) {
  std::vector<double> tau, e1, e2;
  for (int i = 0; i < 6; ++i) {
    tau.push_back(0.1 / std::pow(2.0, i));
    e1.push_back(3.0 * tau.back());
    e2.push_back(0.5 * tau.back() * tau.back());
  }
  EXPECT_NEAR(fit_order(tau, e1), 1.0, 1e-12);
  EXPECT_NEAR(fit_order(tau, e2), 2.0, 1e-12);
  EXPECT_TRUE(std::isnan(fit_order({0.1}, {0.3})));
}

TEST(Diagnostics, FitOrderMatchesClosedFormRegression) {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> noise(-0.2, 0.2);
  std::vector<double> tau, err, lx, ly;
  for (int i = 0; i < 4; ++i) {
    tau.push_back(0.05 / std::pow(2.0, i));
    err.push_back(std::pow(tau.back(), 1.3) * std::exp(noise(gen)));
    lx.push_back(std::log(tau.back()));
    ly.push_back(std::log(err.back()));
  }
  const double mx = (lx[0] + lx[1] + lx[2] + lx[3]) / 4.0;
  const double my = (ly[0] + ly[1] + ly[2] + ly[3]) / 4.0;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 4; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  EXPECT_NEAR(fit_order(tau, err), sxy / sxx, 1e-12);
}

TEST(Diagnostics, LedgerReportFlagsViolation) {
  FlowProblem p = unit_density();
  StabilityLedger ledger(p, 0.1);
  LedgerEntry ok;
  ok.step = 1;
  ok.psi_old = 1.0;
  ok.psi_new = 0.9;
  ok.viscous = 0.05;
  ledger.add(ok);
  LedgerEntry bad = ok;
  bad.step = 2;
  bad.psi_old = 0.9;
  bad.psi_new = 1.2;
  ledger.add(bad);
  const auto r = ledger_report(ledger);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0], 2);
  EXPECT_FALSE(r.ok());
}

TEST(Diagnostics, PolarizationIdentity) {
  // 2 <a + b, a> = ||a||^2 - ||b||^2 + ||a + b||^2 for finite-element fields
  Discretization d(build_rectangle(3, 2, {0.0, 1.0}, {0.0, 1.0}), 2, 1, 1);
  std::mt19937 gen(3);
  std::normal_distribution<double> nd;
  FieldVector a(d.velocity()), b(d.velocity());
  for (auto& v : a.values) v = nd(gen);
  for (auto& v : b.values) v = nd(gen);
  const auto& qc = d.qc();
  const auto aq = eval_vector(a, qc);
  const auto bq = eval_vector(b, qc);
  auto ip = [&](auto f) { return integrate(qc, f); };
  const double lhs = 2.0 * ip([&](std::size_t i) { return dot(aq[i].value + bq[i].value, aq[i].value); });
  const double rhs = ip([&](std::size_t i) { return dot(aq[i].value, aq[i].value); }) -
                     ip([&](std::size_t i) { return dot(bq[i].value, bq[i].value); }) +
                     ip([&](std::size_t i) {
                       const Vec2 s = aq[i].value + bq[i].value;
                       return dot(s, s);
                     });
  EXPECT_NEAR(lhs, rhs, 1e-12 * std::abs(rhs));
}

TEST(Diagnostics, CsvFormat) {
  std::ostringstream os;
  write_timeseries_header(os);
  write_timeseries_row(os, {0.1, 0.25, 0.0, 1e-3, 0.05, 2.0, -1.5e-17});
  EXPECT_EQ(os.str(), "t,E_kinetic,e_div,partition,alpha_min,psi_total,ineq_residual\n0.1,0.25,0,0.001,0.05,2,-1.5e-17\n");
  EXPECT_EQ(std::stod(format_double(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Cases, ExactValues) {
  const auto disk = make_case("disk");
  ASSERT_TRUE(disk.exact);
  const Vec2 x{0.3, 0.4};
  const Vec2 u1 = disk.exact->u[0](x, 1.0);
  EXPECT_NEAR(u1.x, -0.2, 1e-15);
  EXPECT_NEAR(u1.y, 0.15, 1e-15);
  EXPECT_NEAR(disk.exact->p(x, 1.0), -0.03125, 1e-15);
  const Vec2 u2 = disk.exact->u[1](x, 1.0);
  EXPECT_EQ(u2.x, -u1.x);

  const auto ann = make_case("annulus");
  EXPECT_NEAR(ann.alpha0[0]({0.3, 0.4}), 0.5, 1e-15);
  EXPECT_NEAR(ann.alpha0[1]({0.3, 0.4}), 0.5, 1e-15);
  const Vec2 a1 = ann.exact->u[0]({0.2, -0.6}, 0.7);
  const Vec2 a2 = ann.exact->u[1]({0.2, -0.6}, 0.7);
  EXPECT_DOUBLE_EQ(a2.x, 0.5 * a1.x);
  EXPECT_DOUBLE_EQ(a2.y, 0.5 * a1.y);
  EXPECT_EQ(ann.problem.drag.coefficient(0, 1, 0.0, 0.5, 0.5, 0.0), 0.0);
  EXPECT_EQ(ann.velocity_degree, 1);
  EXPECT_EQ(ann.pressure_degree, 2);
}

TEST(Cases, RayleighTaylorData) {
  const auto rt = make_case("rayleigh_taylor");
  EXPECT_NEAR(rt.alpha0[1]({0.25, -2.0}), 0.05, 1e-12);
  EXPECT_NEAR(rt.alpha0[1]({0.25, 2.0}), 0.99, 1e-12);
  EXPECT_EQ(rt.problem.drag.coefficient(0, 1, 0.0, 0.5, 0.5, 0.0), 0.0);
  EXPECT_EQ(rt.formulation, Formulation::BoundedVariable);
  EXPECT_EQ(rt.phase_degree, 2);
  EXPECT_EQ(rt.mesh->num_elements(), 40 * 320);
}

TEST(Cases, InitialFractionsSumToOne) {
  for (const auto& name : case_names()) {
    CaseOptions o;
    if (name == "rayleigh_taylor") o.mesh_size = {4, 16};
    if (name == "annulus") o.mesh_size = {2, 12};
    const auto c = make_case(name, o);
    Discretization d(c.mesh, c.velocity_degree, c.pressure_degree, c.phase_degree);
    const auto s = make_initial_state(d, c.formulation, c.alpha0, c.u0);
    const auto a1 = s.alpha(0);
    const auto a2 = s.alpha(1);
    for (std::size_t i = 0; i < a1.values.size(); ++i) EXPECT_NEAR(a1.values[i] + a2.values[i], 1.0, 1e-14) << name;
  }
}

TEST(Cases, UnknownNameListsCases) {
  try {
    make_case("nope");
    FAIL();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    for (const auto& n : case_names()) EXPECT_NE(msg.find(n), std::string::npos);
  }
  EXPECT_THROW(make_case("disk", {.resolution = "huge"}), std::invalid_argument);
}
