#include "mpfs/assembly.hpp"

#include <algorithm>
#include <string>

namespace mpfs {

namespace detail {

void warn_quadrature(int integrand_degree, int order) {
  if (integrand_degree >= 0 && integrand_degree > order)
    warn("quadrature of order " + std::to_string(order) + " under-integrates an integrand of degree " +
         std::to_string(integrand_degree));
}

}  // namespace detail

SparseMatrix make_pattern(const Space& trial, const Space& test) {
  if (trial.mesh_ptr() != test.mesh_ptr()) throw std::invalid_argument("trial and test spaces live on different meshes");
  const Mesh& mesh = trial.mesh();
  const int rows = test.num_dofs();
  const int cols = trial.num_dofs();
  const int nt = trial.num_scalar_dofs();
  const int ns = test.num_scalar_dofs();

  // scalar test dof -> elements; scalar coupling first, then replicated per component pair
  std::vector<std::vector<int>> scalar_cols(ns);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto dt = trial.element_dofs(e);
    for (int i : test.element_dofs(e)) scalar_cols[i].insert(scalar_cols[i].end(), dt.begin(), dt.end());
  }
  for (auto& c : scalar_cols) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  std::vector<int> ptr(rows + 1, 0);
  std::vector<int> idx;
  for (int cs = 0; cs < test.components(); ++cs)
    for (int i = 0; i < ns; ++i) {
      for (int ct = 0; ct < trial.components(); ++ct)
        for (int j : scalar_cols[i]) idx.push_back(ct * nt + j);
      ptr[cs * ns + i + 1] = static_cast<int>(idx.size());
    }
  std::vector<double> val(idx.size(), 0.0);
  return {rows, cols, std::move(ptr), std::move(idx), std::move(val)};
}

SparseMatrix mass_matrix(const Space& space, const QuadratureCache& qc) {
  return assemble_matrix(space, space, qc, [](const QuadPoint&) {
    return [](const Shape& u, const Shape& v) { return u.comp == v.comp ? u.value * v.value : 0.0; };
  });
}

std::vector<double> mass_vector(const Space& space, const QuadratureCache& qc) {
  if (space.components() != 1) throw std::invalid_argument("mass_vector needs a scalar space");
  return assemble_vector(space, qc, [](const QuadPoint&) { return [](const Shape& v) { return v.value; }; });
}

}  // namespace mpfs
