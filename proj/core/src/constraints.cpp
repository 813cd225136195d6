#include "mpfs/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mpfs {

void ConstraintSet::add_dirichlet(int dof, double value) {
  if (dof < 0) throw std::out_of_range("negative dof id");
  free_slip_.erase(dof);
  dirichlet_[dof] = value;
}

void ConstraintSet::add_free_slip(int dof, int axis) {
  if (dof < 0) throw std::out_of_range("negative dof id");
  if (dirichlet_.count(dof)) return;
  free_slip_[dof] = axis;
}

std::map<int, double> ConstraintSet::values() const {
  std::map<int, double> v = dirichlet_;
  for (const auto& [d, axis] : free_slip_) v[d] = 0.0;
  return v;
}

void apply_constraints(SparseMatrix& a, std::vector<double>& b, const ConstraintSet& cs) {
  if (cs.empty()) return;
  const int n = a.rows();
  if (a.cols() != n || static_cast<int>(b.size()) != n) throw std::invalid_argument("constraints need a square system");
  std::vector<char> fixed(n, 0);
  std::vector<double> g(n, 0.0);
  for (const auto& [d, v] : cs.values()) {
    if (d >= n) throw std::out_of_range("constrained dof outside the system");
    fixed[d] = 1;
    g[d] = v;
  }
  const auto& ptr = a.row_ptr();
  const auto& col = a.col_idx();
  auto& val = a.values();
  for (int i = 0; i < n; ++i) {
    if (fixed[i]) {
      for (int k = ptr[i]; k < ptr[i + 1]; ++k) val[k] = col[k] == i ? 1.0 : 0.0;
      if (a.find(i, i) < 0) throw std::invalid_argument("constrained row has no diagonal entry");
      b[i] = g[i];
      continue;
    }
    for (int k = ptr[i]; k < ptr[i + 1]; ++k)
      if (fixed[col[k]]) {
        b[i] -= val[k] * g[col[k]];
        val[k] = 0.0;
      }
  }
}

void set_constrained_values(std::span<double> x, const ConstraintSet& cs) {
  for (const auto& [d, v] : cs.values()) x[d] = v;
}

void zero_constrained(std::span<double> x, const ConstraintSet& cs) {
  for (const auto& [d, v] : cs.values()) x[d] = 0.0;
}

namespace {

bool has_marker(const std::vector<std::string>& markers, const std::string& m) {
  return markers.empty() || std::find(markers.begin(), markers.end(), m) != markers.end();
}

}  // namespace

void add_dirichlet(ConstraintSet& cs, const Space& space, const std::vector<std::string>& markers,
                   const VectorFunction& g) {
  if (space.components() != 2) throw std::invalid_argument("vector Dirichlet data needs a vector space");
  const int n = space.num_scalar_dofs();
  for (int d : space.boundary_dofs(markers)) {
    const Vec2 v = g(space.dof_points()[d]);
    cs.add_dirichlet(d, v.x);
    cs.add_dirichlet(n + d, v.y);
  }
}

void add_dirichlet(ConstraintSet& cs, const Space& space, const std::vector<std::string>& markers,
                   const ScalarFunction& g) {
  if (space.components() != 1) throw std::invalid_argument("scalar Dirichlet data needs a scalar space");
  for (int d : space.boundary_dofs(markers)) cs.add_dirichlet(d, g(space.dof_points()[d]));
}

void add_free_slip(ConstraintSet& cs, const Space& space, const std::vector<std::string>& markers) {
  if (space.components() != 2) throw std::invalid_argument("free-slip needs a vector space");
  const Mesh& mesh = space.mesh();
  const int n = space.num_scalar_dofs();
  for (const auto& f : mesh.boundary_facets()) {
    if (!has_marker(markers, f.marker)) continue;
    const auto dofs = space.facet_dofs(f);
    const Vec2 a = space.dof_points()[dofs.front()];
    const Vec2 b = space.dof_points()[dofs.back()];
    const double len = norm(b - a);
    int axis = -1;
    if (std::abs(b.x - a.x) <= 1e-10 * len) axis = 0;
    else if (std::abs(b.y - a.y) <= 1e-10 * len) axis = 1;
    if (axis >= 0) {
      for (int d : dofs)
        if (std::abs(space.dof_points()[d][axis] - a[axis]) > 1e-10 * len) axis = -1;
    }
    if (axis < 0) throw std::invalid_argument("free-slip is only supported on axis-aligned facets (marker '" + f.marker + "')");
    for (int d : dofs) cs.add_free_slip(axis * n + d, axis);
  }
}

ConstraintSet component_constraints(const ConstraintSet& cs, int comp, int n) {
  ConstraintSet out;
  for (const auto& [d, v] : cs.dirichlet())
    if (d / n == comp) out.add_dirichlet(d % n, v);
  for (const auto& [d, axis] : cs.free_slip())
    if (d / n == comp) out.add_free_slip(d % n, axis);
  return out;
}

}  // namespace mpfs
