#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mpfs/geometry.hpp"
#include "mpfs/mesh.hpp"
#include "mpfs/quadrature.hpp"
#include "mpfs/reference_element.hpp"

namespace mpfs {

/// Continuous Lagrange space of degree 1 or 2 with 1 or 2 components.
///
/// Scalar dofs are numbered vertices first, then edges (Q2), then cells (Q2).
/// Vector dof (c, s) has global id c * num_scalar_dofs() + s.
class Space {
 public:
  Space(MeshPtr mesh, int degree, int components = 1);

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  int components() const { return components_; }
  int num_scalar_dofs() const { return num_scalar_; }
  int num_dofs() const { return num_scalar_ * components_; }
  int dofs_per_element() const { return local_node_count(degree_); }

  /// Scalar dof ids of element `e` in reference-element order.
  std::span<const int> element_dofs(int e) const {
    return {dofs_.data() + static_cast<std::size_t>(e) * dofs_per_element(), static_cast<std::size_t>(dofs_per_element())};
  }
  const std::vector<Vec2>& dof_points() const { return points_; }

  /// Scalar dofs lying on a boundary facet.
  std::vector<int> facet_dofs(const BoundaryFacet& f) const;
  /// Scalar dofs on facets carrying any of `markers` (all boundary facets when empty).
  std::vector<int> boundary_dofs(const std::vector<std::string>& markers = {}) const;

  bool same_layout(const Space& other) const {
    return mesh_ == other.mesh_ && degree_ == other.degree_ && components_ == other.components_;
  }

 private:
  MeshPtr mesh_;
  int degree_;
  int components_;
  int num_scalar_ = 0;
  std::vector<int> dofs_;
  std::vector<Vec2> points_;
};

using SpacePtr = std::shared_ptr<const Space>;

SpacePtr make_space(MeshPtr mesh, int degree, int components = 1);

/// Coefficient vector of a finite-element function.
struct FieldVector {
  SpacePtr space;
  std::vector<double> values;

  FieldVector() = default;
  explicit FieldVector(SpacePtr s) : space(std::move(s)), values(space->num_dofs(), 0.0) {}
  FieldVector(SpacePtr s, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::span<double> component(int c) {
    const auto n = static_cast<std::size_t>(space->num_scalar_dofs());
    return {values.data() + c * n, n};
  }
  std::span<const double> component(int c) const {
    const auto n = static_cast<std::size_t>(space->num_scalar_dofs());
    return {values.data() + c * n, n};
  }
};

/// Geometric data at every quadrature point of every element.
class QuadratureCache {
 public:
  QuadratureCache(MeshPtr mesh, int order);

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  const QuadratureRule& rule() const { return rule_; }
  int order() const { return order_; }
  int n_qp() const { return static_cast<int>(rule_.size()); }
  int num_elements() const { return mesh_->num_elements(); }
  std::size_t size() const { return points_.size(); }
  std::size_t index(int e, int q) const { return static_cast<std::size_t>(e) * rule_.size() + q; }

  const Vec2& point(std::size_t i) const { return points_[i]; }
  double jxw(std::size_t i) const { return jxw_[i]; }
  /// Inverse Jacobian, (a, i) = d xi_a / d x_i.
  const Mat2& jinv(std::size_t i) const { return jinv_[i]; }
  /// Second derivatives of the geometric map components.
  const std::array<Hess2, 2>& geo_hessian(std::size_t i) const { return hess_[i]; }

 private:
  MeshPtr mesh_;
  int order_;
  QuadratureRule rule_;
  std::vector<Vec2> points_;
  std::vector<double> jxw_;
  std::vector<Mat2> jinv_;
  std::vector<std::array<Hess2, 2>> hess_;
};

/// Physical basis values of a scalar space on one element.
class FEValues {
 public:
  FEValues(const Space& space, const QuadratureCache& qc, bool hessians = false);

  void reinit(int e);
  int element() const { return element_; }
  int n_basis() const { return nb_; }
  int n_qp() const { return nq_; }
  std::span<const int> dofs() const { return space_.element_dofs(element_); }
  double value(int q, int i) const { return ref_value_[q * nb_ + i]; }
  const Vec2& grad(int q, int i) const { return grad_[q * nb_ + i]; }
  const Hess2& hess(int q, int i) const { return hess_[q * nb_ + i]; }
  std::size_t qp_index(int q) const { return qc_.index(element_, q); }

 private:
  const Space& space_;
  const QuadratureCache& qc_;
  bool want_hess_;
  int nb_;
  int nq_;
  int element_ = -1;
  std::vector<double> ref_value_;
  std::vector<Vec2> ref_grad_;
  std::vector<Hess2> ref_hess_;
  std::vector<Vec2> grad_;
  std::vector<Hess2> hess_;
};

struct ScalarQP {
  double value = 0.0;
  Vec2 grad;
};

struct VectorQP {
  Vec2 value;
  Mat2 grad;  ///< (i, j) = d u_i / d x_j
};

std::vector<ScalarQP> eval_scalar(const FieldVector& f, const QuadratureCache& qc);
std::vector<VectorQP> eval_vector(const FieldVector& f, const QuadratureCache& qc);
/// Hessians of each component of a vector field at quadrature points.
std::vector<std::array<Hess2, 2>> eval_vector_hessian(const FieldVector& f, const QuadratureCache& qc);
/// Evaluate a field at a reference point of one element; component `c`.
double eval_at(const FieldVector& f, int e, const Vec2& xi, int c = 0);

using ScalarFunction = std::function<double(const Vec2&)>;
using VectorFunction = std::function<Vec2(const Vec2&)>;

FieldVector interpolate(SpacePtr space, const ScalarFunction& f);
FieldVector interpolate(SpacePtr space, const VectorFunction& f);

/// Integral of g(qp index) over the mesh.
template <class G>
double integrate(const QuadratureCache& qc, G&& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < qc.size(); ++i) s += qc.jxw(i) * g(i);
  return s;
}

}  // namespace mpfs
