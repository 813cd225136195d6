#include "mpfs/cases.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mpfs/mesh.hpp"

namespace mpfs {

namespace {

std::array<int, 2> pick(const CaseOptions& opt, std::array<int, 2> desk, std::array<int, 2> full) {
  if (opt.mesh_size[0] > 0 && opt.mesh_size[1] > 0) return opt.mesh_size;
  if (opt.resolution == "desk") return desk;
  if (opt.resolution == "full") return full;
  throw std::invalid_argument("unknown resolution '" + opt.resolution + "' (desk, full)");
}

double f_of(double t) { return 1.0 / (1.0 + t); }

Vec2 rot(const Vec2& x) { return {-x.y, x.x}; }

}  // namespace

std::vector<std::string> case_names() { return {"disk", "annulus", "rayleigh_taylor", "disk_energy"}; }

CaseDefinition make_case(const std::string& name, const CaseOptions& opt) {
  if (name == "disk") return case_disk_linear_drag(opt);
  if (name == "annulus") return case_annulus_quadratic_drag(opt);
  if (name == "rayleigh_taylor") return case_rayleigh_taylor(opt);
  if (name == "disk_energy") return case_disk_energy(opt);
  std::string list;
  for (const auto& n : case_names()) list += (list.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown case '" + name + "'; available cases: " + list);
}

CaseDefinition case_disk_linear_drag(const CaseOptions& opt) {
  CaseDefinition c;
  c.name = "disk";
  const auto n = pick(opt, {16, 32}, {32, 64});
  c.mesh = build_disk(n[0], n[1], 1.0);
  c.tau = 0.1;
  c.T = 1.0;
  c.problem.drag = DragModel(opt.drag_cap);
  c.problem.phases = {{"phase1", 1.0, 1.0, {}}, {"phase2", 1.0, 1.0, {}}};
  c.problem.drag.set(0, 1, [](double t, double, double, double) { return 0.25 * f_of(t); });
  ExactSolution ex;
  ex.u = {[](const Vec2& x, double t) { return f_of(t) * rot(x); },
          [](const Vec2& x, double t) { return -f_of(t) * rot(x); }};
  ex.alpha = {[](const Vec2&, double) { return 0.5; }, [](const Vec2&, double) { return 0.5; }};
  ex.p = [](const Vec2& x, double t) { return f_of(t) * f_of(t) * (0.5 * dot(x, x) - 0.25); };
  for (int k = 0; k < 2; ++k) {
    c.problem.bcs.push_back({{"boundary"}, ex.u[k], {}});
    c.alpha0.push_back([a = ex.alpha[k]](const Vec2& x) { return a(x, 0.0); });
    c.u0.push_back([u = ex.u[k]](const Vec2& x) { return u(x, 0.0); });
  }
  c.exact = ex;
  return c;
}

CaseDefinition case_annulus_quadratic_drag(const CaseOptions& opt) {
  CaseDefinition c;
  c.name = "annulus";
  const auto n = pick(opt, {32, 192}, {64, 384});
  c.mesh = build_annulus(n[0], n[1], 0.25, 0.75, opt.geometric_degree > 0 ? opt.geometric_degree : 1);
  c.velocity_degree = 1;
  c.pressure_degree = 2;
  c.phase_degree = 1;
  c.tau = 0.05;
  c.T = 1.0;
  c.problem.drag = DragModel(opt.drag_cap);
  auto g2 = [](const Vec2& x, double t) {
    const double r = norm(x);
    const double f = f_of(t);
    return (f * f * (2.0 - r) / (4.0 * (1.0 - r))) * Vec2{x.y, -x.x};
  };
  c.problem.phases = {{"phase1", 1.0, 1.0, {}}, {"phase2", 4.0, 4.0, g2}};
  c.problem.drag.set(0, 1, [](double, double, double, double slip) { return 4.0 * slip; });
  ExactSolution ex;
  ex.u = {[](const Vec2& x, double t) { return f_of(t) * rot(x); },
          [](const Vec2& x, double t) { return 0.5 * f_of(t) * rot(x); }};
  ex.alpha = {[](const Vec2& x, double) { return norm(x); }, [](const Vec2& x, double) { return 1.0 - norm(x); }};
  ex.p = [](const Vec2& x, double t) { return f_of(t) * f_of(t) * (0.5 * dot(x, x) - 5.0 / 32.0); };
  for (int k = 0; k < 2; ++k) {
    c.problem.bcs.push_back({{"inner", "outer"}, ex.u[k], {}});
    c.alpha0.push_back([a = ex.alpha[k]](const Vec2& x) { return a(x, 0.0); });
    c.u0.push_back([u = ex.u[k]](const Vec2& x) { return u(x, 0.0); });
  }
  c.exact = ex;
  return c;
}

CaseDefinition case_rayleigh_taylor(const CaseOptions& opt) {
  CaseDefinition c;
  c.name = "rayleigh_taylor";
  const auto n = pick(opt, {40, 320}, {100, 800});
  c.mesh = build_rectangle(n[0], n[1], {0.0, 0.5}, {-2.0, 2.0});
  c.velocity_degree = 2;
  c.pressure_degree = 1;
  c.phase_degree = 2;
  c.formulation = Formulation::BoundedVariable;
  c.tau = 0.005;
  c.T = 5.0;
  c.problem.drag = DragModel(opt.drag_cap);
  auto g = [](const Vec2&, double) { return Vec2{0.0, -1.0}; };
  c.problem.phases = {{"phase1", 1.0, 0.1, g}, {"phase2", 3.0, 0.3, g}};
  c.problem.drag.set(0, 1, [](double, double, double alpha2, double slip) { return 10.0 * alpha2 * slip; });
  auto alpha2 = [](const Vec2& x) {
    return 0.5 * (0.99 + 0.05) + 0.5 * (0.99 - 0.05) * std::tanh(40.0 * x.y + 4.0 * std::cos(2.0 * std::numbers::pi * x.x));
  };
  c.alpha0 = {[alpha2](const Vec2& x) { return 1.0 - alpha2(x); }, alpha2};
  c.u0 = {[](const Vec2&) { return Vec2{}; }, [](const Vec2&) { return Vec2{}; }};
  for (int k = 0; k < 2; ++k) c.problem.bcs.push_back({{"bottom", "top"}, {}, {"left", "right"}});
  return c;
}

CaseDefinition case_disk_energy(const CaseOptions& opt) {
  CaseDefinition c;
  c.name = "disk_energy";
  const auto n = pick(opt, {4, 8}, {16, 32});
  c.mesh = build_disk(n[0], n[1], 1.0);
  c.tau = 0.1;
  c.T = 1.0;
  c.problem.drag = DragModel(opt.drag_cap);
  c.problem.phases = {{"phase1", 1.0, 0.1, {}}, {"phase2", 2.0, 0.2, {}}};
  c.problem.drag.set(0, 1, [](double, double, double, double slip) { return 4.0 * slip; });
  auto swirl = [](const Vec2& x) { return (1.0 - dot(x, x)) * rot(x); };
  c.alpha0 = {[](const Vec2& x) { return 0.5 + 0.25 * x.x * x.y + 0.1 * x.x; },
              [](const Vec2& x) { return 0.5 - 0.25 * x.x * x.y - 0.1 * x.x; }};
  c.u0 = {swirl, [swirl](const Vec2& x) { return -1.0 * swirl(x); }};
  for (int k = 0; k < 2; ++k) c.problem.bcs.push_back({{"boundary"}, {}, {}});
  return c;
}

}  // namespace mpfs
