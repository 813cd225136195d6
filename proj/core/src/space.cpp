#include "mpfs/space.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace mpfs {

Space::Space(MeshPtr mesh, int degree, int components)
    : mesh_(std::move(mesh)), degree_(degree), components_(components) {
  if (!mesh_) throw std::invalid_argument("space needs a mesh");
  if (degree_ != 1 && degree_ != 2) throw std::invalid_argument("space degree must be 1 or 2");
  if (components_ != 1 && components_ != 2) throw std::invalid_argument("space needs 1 or 2 components");
  const int ne = mesh_->num_elements();
  const int nv = mesh_->num_vertices();
  const int ned = mesh_->num_edges();
  const int nloc = dofs_per_element();
  num_scalar_ = degree_ == 1 ? nv : nv + ned + ne;
  dofs_.resize(static_cast<std::size_t>(ne) * nloc);
  points_.assign(num_scalar_, Vec2{});
  for (int e = 0; e < ne; ++e) {
    int* d = dofs_.data() + static_cast<std::size_t>(e) * nloc;
    for (int k = 0; k < 4; ++k) d[k] = mesh_->element_vertices(e)[k];
    if (degree_ == 2) {
      for (int k = 0; k < 4; ++k) d[4 + k] = nv + mesh_->element_edges(e)[k];
      d[8] = nv + ned + e;
    }
    for (int k = 0; k < nloc; ++k) points_[d[k]] = mesh_->map(e, reference_node(degree_, k));
  }
}

std::vector<int> Space::facet_dofs(const BoundaryFacet& f) const {
  const auto local = edge_local_nodes(degree_, f.local_edge);
  const auto dofs = element_dofs(f.element);
  std::vector<int> out;
  out.reserve(local.size());
  for (int k : local) out.push_back(dofs[k]);
  return out;
}

std::vector<int> Space::boundary_dofs(const std::vector<std::string>& markers) const {
  std::set<int> s;
  for (const auto& f : mesh_->boundary_facets()) {
    if (!markers.empty() && std::find(markers.begin(), markers.end(), f.marker) == markers.end()) continue;
    for (int d : facet_dofs(f)) s.insert(d);
  }
  return {s.begin(), s.end()};
}

SpacePtr make_space(MeshPtr mesh, int degree, int components) {
  return std::make_shared<const Space>(std::move(mesh), degree, components);
}

FieldVector::FieldVector(SpacePtr s, std::vector<double> v) : space(std::move(s)), values(std::move(v)) {
  if (static_cast<int>(values.size()) != space->num_dofs()) throw std::invalid_argument("field length does not match space");
}

QuadratureCache::QuadratureCache(MeshPtr mesh, int order) : mesh_(std::move(mesh)), order_(order), rule_(gauss_rule(order)) {
  const int ne = mesh_->num_elements();
  const int nq = n_qp();
  const int g = mesh_->geometric_degree();
  points_.resize(static_cast<std::size_t>(ne) * nq);
  jxw_.resize(points_.size());
  jinv_.resize(points_.size());
  hess_.resize(points_.size());
  std::vector<BasisEval> basis;
  for (const auto& p : rule_.points) basis.push_back(evaluate_basis(g, p));
  for (int e = 0; e < ne; ++e) {
    const auto& nodes = mesh_->element_nodes(e);
    for (int q = 0; q < nq; ++q) {
      const BasisEval& b = basis[q];
      Vec2 x;
      Mat2 j;
      std::array<Hess2, 2> h{};
      for (int k = 0; k < b.count; ++k) {
        const Vec2& p = mesh_->nodes()[nodes[k]];
        x += b.value[k] * p;
        for (int c = 0; c < 2; ++c) {
          j(c, 0) += p[c] * b.grad[k].x;
          j(c, 1) += p[c] * b.grad[k].y;
          h[c].xx += p[c] * b.hess[k].xx;
          h[c].xy += p[c] * b.hess[k].xy;
          h[c].yy += p[c] * b.hess[k].yy;
        }
      }
      const double det = j.det();
      if (!(det > 0.0)) throw std::runtime_error("non-positive Jacobian at a quadrature point");
      const std::size_t i = index(e, q);
      points_[i] = x;
      jxw_[i] = det * rule_.weights[q];
      jinv_[i] = j.inverse();
      hess_[i] = h;
    }
  }
}

FEValues::FEValues(const Space& space, const QuadratureCache& qc, bool hessians)
    : space_(space), qc_(qc), want_hess_(hessians), nb_(space.dofs_per_element()), nq_(qc.n_qp()) {
  if (space.mesh_ptr() != qc.mesh_ptr()) throw std::invalid_argument("space and quadrature live on different meshes");
  ref_value_.resize(static_cast<std::size_t>(nq_) * nb_);
  ref_grad_.resize(ref_value_.size());
  ref_hess_.resize(ref_value_.size());
  grad_.resize(ref_value_.size());
  hess_.resize(ref_value_.size());
  for (int q = 0; q < nq_; ++q) {
    const BasisEval b = evaluate_basis(space.degree(), qc.rule().points[q]);
    for (int i = 0; i < nb_; ++i) {
      ref_value_[q * nb_ + i] = b.value[i];
      ref_grad_[q * nb_ + i] = b.grad[i];
      ref_hess_[q * nb_ + i] = b.hess[i];
    }
  }
}

void FEValues::reinit(int e) {
  element_ = e;
  for (int q = 0; q < nq_; ++q) {
    const std::size_t idx = qc_.index(e, q);
    const Mat2& ji = qc_.jinv(idx);
    for (int i = 0; i < nb_; ++i) {
      const Vec2& g = ref_grad_[q * nb_ + i];
      // d/dx_i = sum_a d/dxi_a * dxi_a/dx_i
      grad_[q * nb_ + i] = {g.x * ji(0, 0) + g.y * ji(1, 0), g.x * ji(0, 1) + g.y * ji(1, 1)};
    }
    if (!want_hess_) continue;
    const auto& gh = qc_.geo_hessian(idx);
    for (int i = 0; i < nb_; ++i) {
      const Hess2& r = ref_hess_[q * nb_ + i];
      const Vec2& gx = grad_[q * nb_ + i];
      // D2_xi = J^T D2_x J + sum_c g_c H_c  =>  D2_x = J^-T (D2_xi - sum_c g_c H_c) J^-1
      Mat2 m{{r.xx - gx.x * gh[0].xx - gx.y * gh[1].xx, r.xy - gx.x * gh[0].xy - gx.y * gh[1].xy,
              r.xy - gx.x * gh[0].xy - gx.y * gh[1].xy, r.yy - gx.x * gh[0].yy - gx.y * gh[1].yy}};
      const Mat2 out = ji.transpose() * m * ji;
      hess_[q * nb_ + i] = {out(0, 0), out(0, 1), out(1, 1)};
    }
  }
}

std::vector<ScalarQP> eval_scalar(const FieldVector& f, const QuadratureCache& qc) {
  FEValues fe(*f.space, qc);
  std::vector<ScalarQP> out(qc.size());
  for (int e = 0; e < qc.num_elements(); ++e) {
    fe.reinit(e);
    const auto dofs = fe.dofs();
    for (int q = 0; q < fe.n_qp(); ++q) {
      ScalarQP& o = out[fe.qp_index(q)];
      for (int i = 0; i < fe.n_basis(); ++i) {
        const double c = f.values[dofs[i]];
        o.value += c * fe.value(q, i);
        o.grad += c * fe.grad(q, i);
      }
    }
  }
  return out;
}

std::vector<VectorQP> eval_vector(const FieldVector& f, const QuadratureCache& qc) {
  if (f.space->components() != 2) throw std::invalid_argument("eval_vector needs a vector field");
  FEValues fe(*f.space, qc);
  const int n = f.space->num_scalar_dofs();
  std::vector<VectorQP> out(qc.size());
  for (int e = 0; e < qc.num_elements(); ++e) {
    fe.reinit(e);
    const auto dofs = fe.dofs();
    for (int q = 0; q < fe.n_qp(); ++q) {
      VectorQP& o = out[fe.qp_index(q)];
      for (int i = 0; i < fe.n_basis(); ++i) {
        const double cx = f.values[dofs[i]];
        const double cy = f.values[n + dofs[i]];
        const double v = fe.value(q, i);
        const Vec2& g = fe.grad(q, i);
        o.value += Vec2{cx * v, cy * v};
        o.grad(0, 0) += cx * g.x;
        o.grad(0, 1) += cx * g.y;
        o.grad(1, 0) += cy * g.x;
        o.grad(1, 1) += cy * g.y;
      }
    }
  }
  return out;
}

std::vector<std::array<Hess2, 2>> eval_vector_hessian(const FieldVector& f, const QuadratureCache& qc) {
  if (f.space->components() != 2) throw std::invalid_argument("eval_vector_hessian needs a vector field");
  FEValues fe(*f.space, qc, true);
  const int n = f.space->num_scalar_dofs();
  std::vector<std::array<Hess2, 2>> out(qc.size());
  for (int e = 0; e < qc.num_elements(); ++e) {
    fe.reinit(e);
    const auto dofs = fe.dofs();
    for (int q = 0; q < fe.n_qp(); ++q) {
      auto& o = out[fe.qp_index(q)];
      for (int i = 0; i < fe.n_basis(); ++i) {
        const Hess2& h = fe.hess(q, i);
        for (int c = 0; c < 2; ++c) {
          const double coef = f.values[c * n + dofs[i]];
          o[c].xx += coef * h.xx;
          o[c].xy += coef * h.xy;
          o[c].yy += coef * h.yy;
        }
      }
    }
  }
  return out;
}

double eval_at(const FieldVector& f, int e, const Vec2& xi, int c) {
  const BasisEval b = evaluate_basis(f.space->degree(), xi);
  const auto dofs = f.space->element_dofs(e);
  const std::size_t off = static_cast<std::size_t>(c) * f.space->num_scalar_dofs();
  double v = 0.0;
  for (int i = 0; i < b.count; ++i) v += b.value[i] * f.values[off + dofs[i]];
  return v;
}

FieldVector interpolate(SpacePtr space, const ScalarFunction& f) {
  if (space->components() != 1) throw std::invalid_argument("scalar interpolation into a vector space");
  FieldVector out(space);
  for (int i = 0; i < space->num_scalar_dofs(); ++i) out[i] = f(space->dof_points()[i]);
  return out;
}

FieldVector interpolate(SpacePtr space, const VectorFunction& f) {
  if (space->components() != 2) throw std::invalid_argument("vector interpolation into a scalar space");
  FieldVector out(space);
  const int n = space->num_scalar_dofs();
  for (int i = 0; i < n; ++i) {
    const Vec2 v = f(space->dof_points()[i]);
    out[i] = v.x;
    out[n + i] = v.y;
  }
  return out;
}

}  // namespace mpfs
