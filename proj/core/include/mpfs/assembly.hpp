#pragma once

#include <string>
#include <vector>

#include "mpfs/log.hpp"
#include "mpfs/space.hpp"
#include "mpfs/sparse.hpp"

namespace mpfs {

/// One basis function evaluated at a quadrature point. For vector spaces the
/// function is (scalar basis) * e_comp.
struct Shape {
  double value = 0.0;
  Vec2 grad;
  int comp = 0;
};

struct QuadPoint {
  std::size_t index = 0;  ///< global quadrature-point index (element * n_qp + q)
  int element = 0;
  int q = 0;
  Vec2 x;
};

/// Structure of the matrix pairing a trial space (columns) with a test space (rows).
SparseMatrix make_pattern(const Space& trial, const Space& test);

namespace detail {
void warn_quadrature(int integrand_degree, int order);
}

/// Assemble sum_e int integrand(trial_j, test_i).
///
/// `integrand(QuadPoint)` returns a kernel `(const Shape& trial, const Shape& test) -> double`.
/// If `pattern` is given it must come from make_pattern(trial, test); its values are overwritten.
template <class Integrand>
SparseMatrix assemble_matrix(const Space& trial, const Space& test, const QuadratureCache& qc, Integrand&& integrand,
                             const SparseMatrix* pattern = nullptr, int integrand_degree = -1) {
  detail::warn_quadrature(integrand_degree, qc.rule().order);
  SparseMatrix a = pattern ? *pattern : make_pattern(trial, test);
  std::fill(a.values().begin(), a.values().end(), 0.0);
  FEValues ft(trial, qc);
  FEValues fs(test, qc);
  const int nbt = ft.n_basis();
  const int nbs = fs.n_basis();
  const int ct = trial.components();
  const int cs = test.components();
  const int nt = trial.num_scalar_dofs();
  const int ns = test.num_scalar_dofs();
  const int lt = nbt * ct;
  const int ls = nbs * cs;
  std::vector<double> local(static_cast<std::size_t>(lt) * ls);
  std::vector<Shape> st(lt);
  std::vector<Shape> ss(ls);
  std::vector<int> rows(ls);
  std::vector<int> cols(lt);
  for (int e = 0; e < qc.num_elements(); ++e) {
    ft.reinit(e);
    fs.reinit(e);
    std::fill(local.begin(), local.end(), 0.0);
    for (int q = 0; q < qc.n_qp(); ++q) {
      const std::size_t idx = qc.index(e, q);
      const QuadPoint qp{idx, e, q, qc.point(idx)};
      auto kernel = integrand(qp);
      const double w = qc.jxw(idx);
      for (int c = 0; c < ct; ++c)
        for (int j = 0; j < nbt; ++j) st[c * nbt + j] = {ft.value(q, j), ft.grad(q, j), c};
      for (int c = 0; c < cs; ++c)
        for (int i = 0; i < nbs; ++i) ss[c * nbs + i] = {fs.value(q, i), fs.grad(q, i), c};
      for (int i = 0; i < ls; ++i)
        for (int j = 0; j < lt; ++j) local[static_cast<std::size_t>(i) * lt + j] += w * kernel(st[j], ss[i]);
    }
    const auto dt = ft.dofs();
    const auto ds = fs.dofs();
    for (int c = 0; c < ct; ++c)
      for (int j = 0; j < nbt; ++j) cols[c * nbt + j] = c * nt + dt[j];
    for (int c = 0; c < cs; ++c)
      for (int i = 0; i < nbs; ++i) rows[c * nbs + i] = c * ns + ds[i];
    for (int i = 0; i < ls; ++i)
      for (int j = 0; j < lt; ++j) {
        const double v = local[static_cast<std::size_t>(i) * lt + j];
        if (v != 0.0) a.add(rows[i], cols[j], v);
      }
  }
  return a;
}

/// Assemble sum_e int integrand(test_i). `integrand(QuadPoint)` returns `(const Shape& test) -> double`.
template <class Integrand>
std::vector<double> assemble_vector(const Space& test, const QuadratureCache& qc, Integrand&& integrand,
                                    int integrand_degree = -1) {
  detail::warn_quadrature(integrand_degree, qc.rule().order);
  std::vector<double> b(test.num_dofs(), 0.0);
  FEValues fs(test, qc);
  const int nbs = fs.n_basis();
  const int cs = test.components();
  const int ns = test.num_scalar_dofs();
  for (int e = 0; e < qc.num_elements(); ++e) {
    fs.reinit(e);
    const auto ds = fs.dofs();
    for (int q = 0; q < qc.n_qp(); ++q) {
      const std::size_t idx = qc.index(e, q);
      const QuadPoint qp{idx, e, q, qc.point(idx)};
      auto kernel = integrand(qp);
      const double w = qc.jxw(idx);
      for (int c = 0; c < cs; ++c)
        for (int i = 0; i < nbs; ++i) b[c * ns + ds[i]] += w * kernel(Shape{fs.value(q, i), fs.grad(q, i), c});
    }
  }
  return b;
}

/// Mass matrix of a space (all components).
SparseMatrix mass_matrix(const Space& space, const QuadratureCache& qc);
/// Integral of each scalar basis function.
std::vector<double> mass_vector(const Space& scalar_space, const QuadratureCache& qc);

}  // namespace mpfs
