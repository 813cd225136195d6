#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "mpfs/space.hpp"
#include "mpfs/sparse.hpp"

namespace mpfs {

/// Dirichlet values and free-slip (zero normal component) dofs of one space.
/// A dof appears at most once; Dirichlet data takes precedence over free-slip.
class ConstraintSet {
 public:
  void add_dirichlet(int dof, double value);
  /// `dof` is the normal-component dof of a vector space; `axis` is the normal direction.
  void add_free_slip(int dof, int axis);

  bool empty() const { return dirichlet_.empty() && free_slip_.empty(); }
  std::size_t size() const { return dirichlet_.size() + free_slip_.size(); }
  bool contains(int dof) const { return dirichlet_.count(dof) || free_slip_.count(dof); }
  const std::map<int, double>& dirichlet() const { return dirichlet_; }
  const std::map<int, int>& free_slip() const { return free_slip_; }

  /// All constrained dofs with their prescribed values (free-slip dofs have value 0).
  std::map<int, double> values() const;

 private:
  std::map<int, double> dirichlet_;
  std::map<int, int> free_slip_;
};

/// Symmetric elimination: constrained rows and columns are zeroed, the diagonal
/// set to 1 and the right-hand side lifted by the prescribed values.
void apply_constraints(SparseMatrix& a, std::vector<double>& b, const ConstraintSet& cs);

/// Overwrite constrained entries of x with their prescribed values.
void set_constrained_values(std::span<double> x, const ConstraintSet& cs);
/// Zero the constrained entries of x.
void zero_constrained(std::span<double> x, const ConstraintSet& cs);

/// Dirichlet data for every component of a vector space on facets with the given markers.
void add_dirichlet(ConstraintSet& cs, const Space& space, const std::vector<std::string>& markers,
                   const VectorFunction& g);
/// Dirichlet data for a scalar space.
void add_dirichlet(ConstraintSet& cs, const Space& space, const std::vector<std::string>& markers,
                   const ScalarFunction& g);
/// Free-slip on the given markers of a vector space. Facets must be axis-aligned.
void add_free_slip(ConstraintSet& cs, const Space& space, const std::vector<std::string>& markers);

/// Constraints of component `comp` re-indexed to the scalar dofs of that component.
ConstraintSet component_constraints(const ConstraintSet& cs, int comp, int num_scalar_dofs);

}  // namespace mpfs
