#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

#include "mpfs/assembly.hpp"
#include "mpfs/cases.hpp"
#include "mpfs/fractional_step.hpp"
#include "mpfs/phase_transport.hpp"
#include "mpfs/solvers.hpp"

using namespace mpfs;

namespace {

struct DiskSetup {
  CaseDefinition c = make_case("disk");
  Discretization d{c.mesh, c.velocity_degree, c.pressure_degree, c.phase_degree};
};

DiskSetup& disk() {
  static DiskSetup s;
  return s;
}

SparseMatrix laplacian(const Discretization& d) {
  return assemble_matrix(*d.pressure(), *d.pressure(), d.qc(),
                         [](const QuadPoint&) { return [](const Shape& u, const Shape& v) { return dot(u.grad, v.grad); }; },
                         &d.pressure_pattern());
}

}  // namespace

static void BM_VelocityMassAssembly(benchmark::State& st) {
  auto& s = disk();
  for (auto _ : st) benchmark::DoNotOptimize(mass_matrix(*s.d.velocity(), s.d.qc()));
  st.counters["elements"] = s.c.mesh->num_elements();
}
BENCHMARK(BM_VelocityMassAssembly)->Unit(benchmark::kMillisecond);

static void BM_PressureLaplaceAssembly(benchmark::State& st) {
  auto& s = disk();
  for (auto _ : st) benchmark::DoNotOptimize(laplacian(s.d));
}
BENCHMARK(BM_PressureLaplaceAssembly)->Unit(benchmark::kMillisecond);

static void BM_VelocityMassSpMV(benchmark::State& st) {
  auto& s = disk();
  const auto m = mass_matrix(*s.d.velocity(), s.d.qc());
  std::vector<double> x(m.cols(), 1.0), y(m.rows());
  for (auto _ : st) {
    m.multiply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  st.counters["nnz"] = static_cast<double>(m.nnz());
}
BENCHMARK(BM_VelocityMassSpMV);

static void BM_PressureNeumannSolve(benchmark::State& st) {
  auto& s = disk();
  const auto a = laplacian(s.d);
  const auto& pts = s.d.pressure()->dof_points();
  std::vector<double> b(pts.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = s.d.pressure_weights()[i] * std::sin(3.0 * pts[i].x) * pts[i].y;
  SolveStats stats;
  for (auto _ : st)
    benchmark::DoNotOptimize(solve_singular_neumann(a, b, s.d.pressure_weights(), {1e-10}, &stats));
  st.counters["iterations"] = stats.iterations;
}
BENCHMARK(BM_PressureNeumannSolve)->Unit(benchmark::kMillisecond);

static void BM_FractionalStepAdvance(benchmark::State& st) {
  auto& s = disk();
  auto state = make_initial_state(s.d, s.c.formulation, s.c.alpha0, s.c.u0);
  FractionalStepScheme fs(s.d, s.c.problem, {.tau = 0.1});
  state.p = fs.initialize_pressure(state);
  for (auto _ : st) benchmark::DoNotOptimize(fs.advance(state));
}
BENCHMARK(BM_FractionalStepAdvance)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
