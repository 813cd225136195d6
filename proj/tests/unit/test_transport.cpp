#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mpfs/mesh.hpp"
#include "mpfs/norms.hpp"
#include "mpfs/phase_transport.hpp"

using namespace mpfs;

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

TEST(AlphaMaps, RoundTrip) {
  for (auto f : {Formulation::SqrtVariable, Formulation::BoundedVariable, Formulation::Raw})
    for (double a : {0.0, 1e-8, 0.05, 0.5, 0.99}) EXPECT_NEAR(alpha_from(f, var_from_alpha(f, a)), a, 1e-14);
}

TEST(AlphaMaps, DerivativeMatchesFiniteDifference) {
  for (auto f : {Formulation::SqrtVariable, Formulation::BoundedVariable, Formulation::Raw})
    for (double v : {-3.0, -0.4, 0.2, 1.7, 150.0}) {
      const double h = 1e-6 * std::max(1.0, std::abs(v));
      const double fd = (alpha_from(f, v + h) - alpha_from(f, v - h)) / (2 * h);
      EXPECT_NEAR(dalpha_dvar(f, v), fd, 1e-7 * std::max(1.0, std::abs(fd))) << to_string(f) << " " << v;
    }
}

TEST(AlphaMaps, BoundedVariableNeverReachesOne) {
  for (double v : {-1e6, -2.0, 0.0, 3.0, 1e6, 1e12}) {
    const double a = alpha_from(Formulation::BoundedVariable, v);
    EXPECT_GE(a, 0.0);
    EXPECT_LT(a, 1.0);
  }
  EXPECT_THROW(var_from_alpha(Formulation::BoundedVariable, 1.0), std::domain_error);
  EXPECT_THROW(var_from_alpha(Formulation::SqrtVariable, -0.1), std::domain_error);
}

TEST(AlphaMaps, FormulationNames) {
  for (auto f : {Formulation::SqrtVariable, Formulation::BoundedVariable, Formulation::Raw})
    EXPECT_EQ(formulation_from_string(to_string(f)), f);
  EXPECT_THROW(formulation_from_string("log"), std::invalid_argument);
}

TEST(Transport, ZeroVelocityLeavesFieldUnchanged) {
  auto mesh = build_rectangle(4, 4, {0, 1}, {0, 1});
  auto z = make_space(mesh, 1);
  auto x = make_space(mesh, 2, 2);
  QuadratureCache qc(mesh, 6);
  const auto phi = interpolate(z, ScalarFunction([](const Vec2& p) { return 0.3 + p.x * p.y; }));
  const FieldVector u(x);
  for (auto f : {Formulation::SqrtVariable, Formulation::BoundedVariable, Formulation::Raw})
    for (int chi : {0, 1}) {
      TransportConfig cfg;
      cfg.formulation = f;
      cfg.chi = chi;
      const auto next = transport_step(phi, u, 0.1, cfg, qc);
      for (std::size_t i = 0; i < phi.size(); ++i) EXPECT_NEAR(next[i], phi[i], 1e-12);
    }
}

// Constant state, linear velocity (D/2)(x, y): div u = D and u . grad phi = 0, so the
// step reduces to the scalar update (phi - c)/tau + k D phi = 0.
TEST(Transport, ConstantStateFollowsScalarUpdate) {
  auto mesh = build_rectangle(1, 1, {-1, 1}, {-1, 1});
  auto z = make_space(mesh, 1);
  auto x = make_space(mesh, 2, 2);
  QuadratureCache qc(mesh, 6);
  const double d = 0.8;
  const double tau = 0.25;
  const auto u = interpolate(x, VectorFunction([&](const Vec2& p) { return 0.5 * d * p; }));
  for (double c : {0.4, 2.5}) {
    const auto phi = interpolate(z, ScalarFunction([&](const Vec2&) { return c; }));
    struct Case {
      Formulation f;
      double k;
    };
    for (const Case& cs : {Case{Formulation::SqrtVariable, 0.5}, Case{Formulation::BoundedVariable, 0.5 * (1 + c)},
                           Case{Formulation::Raw, 1.0}})
      for (int chi : {0, 1}) {
        TransportConfig cfg;
        cfg.formulation = cs.f;
        cfg.chi = chi;
        const auto next = transport_step(phi, u, tau, cfg, qc);
        const double expect = c / (1.0 + tau * cs.k * d);
        for (std::size_t i = 0; i < next.size(); ++i) EXPECT_NEAR(next[i], expect, 1e-11) << to_string(cs.f) << " chi " << chi;
      }
  }
}

TEST(Transport, LeastSquaresStepSatisfiesEnergyIdentity) {
  auto mesh = build_rectangle(6, 4, {0, 1.5}, {0, 1});
  auto z = make_space(mesh, 1);
  auto x = make_space(mesh, 2, 2);
  QuadratureCache qc(mesh, 6);
  // tangential on the boundary of [0,1.5]x[0,1], not divergence free
  const auto u = interpolate(x, VectorFunction([](const Vec2& p) {
    return Vec2{std::sin(2 * pi * p.x / 1.5) * (1 + p.y), std::sin(pi * p.y) * std::cos(p.x)};
  }));
  auto phi = interpolate(z, ScalarFunction([](const Vec2& p) { return 0.5 + 0.4 * std::cos(3 * p.x) * p.y; }));
  TransportConfig cfg;
  for (int n = 0; n < 10; ++n) {
    const auto next = transport_step(phi, u, 0.05, cfg, qc);
    const auto tb = sqrt_transport_balance(phi, next, u, 0.05, qc);
    EXPECT_LE(std::abs(tb.defect()), 1e-9 * tb.norm_old_sq);
    EXPECT_LT(tb.norm_new_sq, tb.norm_old_sq);
    phi = next;
  }
}

TEST(Transport, RigidRotationKeepsRadialProfile) {
  std::vector<double> change;
  for (int n : {4, 8, 16}) {
    auto mesh = build_disk(n, n, 1.0);
    auto z = make_space(mesh, 1);
    auto x = make_space(mesh, 2, 2);
    QuadratureCache qc(mesh, 6);
    const auto u = interpolate(x, VectorFunction([](const Vec2& p) { return Vec2{-p.y, p.x}; }));
    const auto phi = interpolate(z, ScalarFunction([](const Vec2& p) { return 1.0 - 0.5 * dot(p, p); }));
    const auto next = transport_step(phi, u, 0.1, TransportConfig{}, qc);
    FieldVector diff(z);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = next[i] - phi[i];
    change.push_back(norm(diff, NormKind::L2, qc) / norm(phi, NormKind::L2, qc));
  }
  EXPECT_LT(change[0], 1e-3);
  EXPECT_LT(change[1], 0.5 * change[0]);
  EXPECT_LT(change[2], 0.5 * change[1]);
}

TEST(Transport, BoundedVariableUnderCompressionStaysBelowOne) {
  auto mesh = build_rectangle(8, 8, {0, 1}, {0, 1});
  auto z = make_space(mesh, 2);
  auto x = make_space(mesh, 2, 2);
  QuadratureCache qc(mesh, 6);
  const auto u = interpolate(x, VectorFunction([](const Vec2& p) {
    return Vec2{-std::sin(2 * pi * p.x), -std::sin(2 * pi * p.y)};
  }));
  const auto alpha0 = interpolate(z, ScalarFunction([](const Vec2&) { return 0.6; }));
  auto phi = changed_variable_of(Formulation::BoundedVariable, alpha0);
  TransportConfig cfg;
  cfg.formulation = Formulation::BoundedVariable;
  double amax = 0.0;
  for (int n = 0; n < 20; ++n) {
    phi = transport_step(phi, u, 0.05, cfg, qc);
    const auto a = alpha_of(Formulation::BoundedVariable, phi);
    for (double v : a.values) {
      EXPECT_GE(v, 0.0);
      EXPECT_LT(v, 1.0);
      amax = std::max(amax, v);
    }
  }
  EXPECT_GT(amax, 0.6);
}

TEST(Transport, RejectsBadArguments) {
  auto mesh = build_rectangle(2, 2, {0, 1}, {0, 1});
  auto z = make_space(mesh, 1);
  auto x = make_space(mesh, 2, 2);
  QuadratureCache qc(mesh, 4);
  const FieldVector phi(z), u(x);
  EXPECT_THROW(transport_step(phi, u, 0.0, {}, qc), std::invalid_argument);
  TransportConfig cfg;
  cfg.chi = 2;
  EXPECT_THROW(transport_step(phi, u, 0.1, cfg, qc), std::invalid_argument);
  EXPECT_THROW(transport_step(phi, phi, 0.1, {}, qc), std::invalid_argument);
}
