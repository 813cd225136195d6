#include "mpfs/monolithic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mpfs/assembly.hpp"
#include "mpfs/constraints.hpp"

namespace mpfs {

namespace {

/// global(r0 + i, c0 + j) += s * block(i, j), or s * block(j, i) when transposed.
void scatter(SparseMatrix& global, const SparseMatrix& block, int r0, int c0, double s = 1.0, bool transposed = false) {
  const auto& rp = block.row_ptr();
  const auto& ci = block.col_idx();
  const auto& v = block.values();
  auto& gv = global.values();
  for (int i = 0; i < block.rows(); ++i)
    for (int p = rp[i]; p < rp[i + 1]; ++p) {
      if (v[p] == 0.0) continue;
      const int r = transposed ? ci[p] : i;
      const int c = transposed ? i : ci[p];
      const auto pos = global.find(r0 + r, c0 + c);
      if (pos < 0) throw std::logic_error("block entry outside the coupled pattern");
      gv[pos] += s * v[p];
    }
}

void add_pattern(TripletBuilder& tb, const SparseMatrix& block, int r0, int c0, bool transposed = false) {
  const auto& rp = block.row_ptr();
  const auto& ci = block.col_idx();
  for (int i = 0; i < block.rows(); ++i)
    for (int p = rp[i]; p < rp[i + 1]; ++p) {
      if (transposed)
        tb.add(r0 + ci[p], c0 + i, 0.0);
      else
        tb.add(r0 + i, c0 + ci[p], 0.0);
    }
}

SparseMatrix extract_block(const SparseMatrix& a, int r0, int nr, int c0, int nc) {
  std::vector<int> rp{0};
  std::vector<int> ci;
  std::vector<double> v;
  for (int i = r0; i < r0 + nr; ++i) {
    for (int p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) {
      const int c = a.col_idx()[p];
      if (c >= c0 && c < c0 + nc) {
        ci.push_back(c - c0);
        v.push_back(a.values()[p]);
      }
    }
    rp.push_back(static_cast<int>(ci.size()));
  }
  return SparseMatrix(nr, nc, std::move(rp), std::move(ci), std::move(v));
}

}  // namespace

MonolithicScheme::MonolithicScheme(const Discretization& d, const FlowProblem& problem, MonolithicConfig cfg)
    : d_(&d), problem_(&problem), cfg_(std::move(cfg)) {
  problem.validate();
  if (!(cfg_.tau > 0.0)) throw std::invalid_argument("time step must be positive");
  if (d.velocity()->degree() != 2 || d.pressure()->degree() != 1)
    throw std::invalid_argument("the monolithic scheme needs the Taylor-Hood pair (velocity 2, pressure 1)");
}

void MonolithicScheme::build_pattern() const {
  const int m = problem_->num_phases();
  const int nv = d_->velocity()->num_dofs();
  const int np = d_->pressure()->num_dofs();
  const int n = m * nv + np + 1;
  vv_pattern_ = make_pattern(*d_->velocity(), *d_->velocity());
  pv_pattern_ = make_pattern(*d_->pressure(), *d_->velocity());
  const SparseMatrix& vv = vv_pattern_;
  const SparseMatrix& pv = pv_pattern_;
  TripletBuilder tb(n, n);
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < m; ++l) add_pattern(tb, vv, k * nv, l * nv);
    add_pattern(tb, pv, k * nv, m * nv);
    add_pattern(tb, pv, m * nv, k * nv, true);
  }
  for (int i = 0; i < np; ++i) {
    tb.add(m * nv + i, n - 1, 0.0);
    tb.add(n - 1, m * nv + i, 0.0);
  }
  pattern_ = tb.build();
}

FlowState MonolithicScheme::advance(const FlowState& s, MonolithicStats* stats) const {
  const int m = problem_->num_phases();
  if (static_cast<int>(s.phases.size()) != m) throw std::invalid_argument("state has the wrong number of phases");
  if (pattern_.rows() == 0) build_pattern();
  const auto& qc = d_->qc();
  const double tau = cfg_.tau;
  const double t_new = s.t + tau;
  const Space& vs = *d_->velocity();
  const Space& ps = *d_->pressure();
  const int nv = vs.num_dofs();
  const int np = ps.num_dofs();
  const int n = m * nv + np + 1;
  const int p0 = m * nv;
  if (stats) *stats = {};

  TransportConfig tcfg = cfg_.transport;
  tcfg.formulation = s.formulation;
  FlowState next;
  next.t = t_new;
  next.step = s.step + 1;
  next.formulation = s.formulation;
  next.phases.resize(m);
  std::vector<std::vector<double>> a0(m), a1(m);
  std::vector<std::vector<VectorQP>> uo(m);
  for (int k = 0; k < m; ++k) {
    SolveStats st;
    next.phases[k].var = transport_step(s.phases[k].var, s.phases[k].u, tau, tcfg, qc, &st);
    if (stats) stats->transport.push_back(st);
    a0[k] = alpha_at_qp(s.formulation, s.phases[k].var, qc);
    a1[k] = alpha_at_qp(s.formulation, next.phases[k].var, qc);
    uo[k] = eval_vector(s.phases[k].u, qc);
  }

  // gamma_kl at level n, one array per unordered pair
  std::vector<std::vector<std::vector<double>>> gamma(m, std::vector<std::vector<double>>(m));
  for (const auto& [a, b] : problem_->drag.pairs()) {
    std::vector<double> g(qc.size());
    for (std::size_t i = 0; i < qc.size(); ++i)
      g[i] = problem_->drag.coefficient(a, b, s.t, a0[a][i], a0[b][i], norm(uo[a][i].value - uo[b][i].value));
    gamma[a][b] = g;
    gamma[b][a] = std::move(g);
  }

  SparseMatrix sys = pattern_;
  std::fill(sys.values().begin(), sys.values().end(), 0.0);
  std::vector<double> rhs(n, 0.0);
  for (int k = 0; k < m; ++k) {
    const auto& ph = problem_->phases[k];
    const double rho = ph.rho;
    const double mu = ph.mu;
    std::vector<double> drag_sum(qc.size(), 0.0);
    for (int l = 0; l < m; ++l)
      if (!gamma[k][l].empty())
        for (std::size_t i = 0; i < qc.size(); ++i) drag_sum[i] += gamma[k][l][i];
    const SparseMatrix akk = assemble_matrix(vs, vs, qc, [&](const QuadPoint& qp) {
      const std::size_t i = qp.index;
      const double mass = rho * (a0[k][i] + a1[k][i]) / (2.0 * tau) + drag_sum[i];
      const Vec2 cw = (0.5 * rho * a1[k][i]) * uo[k][i].value;
      const double visc = mu * a1[k][i];
      return [mass, cw, visc](const Shape& t, const Shape& v) {
        double r = visc * t.grad[v.comp] * v.grad[t.comp];
        if (t.comp == v.comp)
          r += mass * t.value * v.value + dot(cw, t.grad) * v.value - dot(cw, v.grad) * t.value +
               visc * dot(t.grad, v.grad);
        return r;
      };
    }, &vv_pattern_);
    scatter(sys, akk, k * nv, k * nv);
    for (int l = 0; l < m; ++l) {
      if (l == k || gamma[k][l].empty()) continue;
      const auto& g = gamma[k][l];
      const SparseMatrix mkl = assemble_matrix(vs, vs, qc, [&](const QuadPoint& qp) {
        const double gi = g[qp.index];
        return [gi](const Shape& t, const Shape& v) { return t.comp == v.comp ? -gi * t.value * v.value : 0.0; };
      }, &vv_pattern_);
      scatter(sys, mkl, k * nv, l * nv);
    }
    const SparseMatrix gk = assemble_matrix(ps, vs, qc, [&](const QuadPoint& qp) {
      const double al = a1[k][qp.index];
      return [al](const Shape& t, const Shape& v) { return al * t.grad[v.comp] * v.value; };
    }, &pv_pattern_);
    scatter(sys, gk, k * nv, p0);
    scatter(sys, gk, p0, k * nv, 1.0, true);
    std::vector<Vec2> grav(qc.size());
    if (ph.g)
      for (std::size_t i = 0; i < qc.size(); ++i) grav[i] = ph.g(qc.point(i), t_new);
    const auto bk = assemble_vector(vs, qc, [&](const QuadPoint& qp) {
      const std::size_t i = qp.index;
      const Vec2 f = (rho * a0[k][i] / tau) * uo[k][i].value + (rho * a1[k][i]) * grav[i];
      return [f](const Shape& v) { return f[v.comp] * v.value; };
    });
    std::copy(bk.begin(), bk.end(), rhs.begin() + static_cast<std::ptrdiff_t>(k) * nv);
  }
  const auto& w = d_->pressure_weights();
  for (int i = 0; i < np; ++i) {
    sys.values()[sys.find(p0 + i, n - 1)] = w[i];
    sys.values()[sys.find(n - 1, p0 + i)] = w[i];
  }

  ConstraintSet cs;
  for (int k = 0; k < m; ++k) {
    const ConstraintSet ck = velocity_constraints(*d_, problem_->bcs[k], t_new);
    for (const auto& [dof, v] : ck.dirichlet()) cs.add_dirichlet(k * nv + dof, v);
    for (const auto& [dof, axis] : ck.free_slip()) cs.add_free_slip(k * nv + dof, axis);
  }
  apply_constraints(sys, rhs, cs);
  if (stats) stats->rhs_norm = norm2(rhs);

  // preconditioner pieces
  std::vector<SparseMatrix> blocks;
  std::vector<std::vector<double>> vdiag;
  for (int k = 0; k < m; ++k) {
    blocks.push_back(extract_block(sys, k * nv, nv, k * nv, nv));
    vdiag.push_back(blocks.back().diagonal());
  }
  std::vector<double> c(qc.size(), 0.0), dvisc(qc.size(), 0.0);
  for (int k = 0; k < m; ++k) {
    const auto& ph = problem_->phases[k];
    for (std::size_t i = 0; i < qc.size(); ++i) {
      const double am = 0.5 * (a0[k][i] + a1[k][i]);
      if (am > 0.0) c[i] += a1[k][i] * a1[k][i] / (ph.rho * am);
      dvisc[i] += std::max(a1[k][i], 0.0) / ph.mu;
    }
  }
  const SparseMatrix lap = assemble_matrix(
      ps, ps, qc,
      [&](const QuadPoint& qp) {
        const double ci = c[qp.index];
        return [ci](const Shape& t, const Shape& v) { return ci * dot(t.grad, v.grad); };
      },
      &d_->pressure_pattern());
  const auto mdiag = assemble_matrix(
                         ps, ps, qc,
                         [&](const QuadPoint& qp) {
                           const double di = dvisc[qp.index];
                           return [di](const Shape& t, const Shape& v) { return di * t.value * v.value; };
                         },
                         &d_->pressure_pattern())
                         .diagonal();
  double wsum = 0.0;
  for (double x : w) wsum += x;

  const bool triangular = cfg_.precond == SaddlePreconditioner::BlockTriangular;
  const SolverSettings vset{cfg_.inner_velocity_tol, 1e-30, 2000, Preconditioner::Diagonal, 40};
  const SolverSettings pset{cfg_.inner_pressure_tol, 1e-30, 2000, Preconditioner::Diagonal, 40};

  auto op = [&](std::span<const double> x, std::span<double> y) { sys.multiply(x, y); };
  auto pre = [&](std::span<const double> r, std::span<double> z) {
    // pressure and multiplier: [-S w; w^T 0]
    std::vector<double> rp(r.begin() + p0, r.begin() + p0 + np);
    double lambda = 0.0;
    for (double x : rp) lambda += x;
    lambda /= wsum;
    for (int i = 0; i < np; ++i) rp[i] -= lambda * w[i];
    std::vector<double> zp(np, 0.0);
    if (triangular) {
      try {
        zp = solve_singular_neumann(lap, rp, w, pset);
      } catch (const SolverError&) {
        std::fill(zp.begin(), zp.end(), 0.0);
      }
      for (int i = 0; i < np; ++i) zp[i] = -(zp[i] / tau + rp[i] / mdiag[i]);
    } else {
      for (int i = 0; i < np; ++i) zp[i] = -rp[i] / mdiag[i];
    }
    double mean = 0.0;
    for (int i = 0; i < np; ++i) mean += w[i] * zp[i];
    const double shift = (r[n - 1] - mean) / wsum;
    for (int i = 0; i < np; ++i) z[p0 + i] = zp[i] + shift;
    z[n - 1] = lambda;

    std::vector<double> zfull(z.begin(), z.end());
    std::fill(zfull.begin(), zfull.begin() + p0, 0.0);
    std::vector<double> gp(n, 0.0);
    if (triangular) sys.multiply(zfull, gp);
    for (int k = 0; k < m; ++k) {
      std::vector<double> rk(nv);
      for (int i = 0; i < nv; ++i) rk[i] = r[k * nv + i] - gp[k * nv + i];
      std::vector<double> zk(nv);
      if (triangular) {
        try {
          zk = solve_nonsymmetric(blocks[k], rk, vset);
        } catch (const SolverError&) {
          for (int i = 0; i < nv; ++i) zk[i] = rk[i] / vdiag[k][i];
        }
      } else {
        for (int i = 0; i < nv; ++i) zk[i] = rk[i] / vdiag[k][i];
      }
      std::copy(zk.begin(), zk.end(), z.begin() + static_cast<std::ptrdiff_t>(k) * nv);
    }
  };

  std::vector<double> x0(n, 0.0);
  for (int k = 0; k < m; ++k)
    std::copy(s.phases[k].u.values.begin(), s.phases[k].u.values.end(),
              x0.begin() + static_cast<std::ptrdiff_t>(k) * nv);
  if (s.p.space && s.p.space->same_layout(ps)) std::copy(s.p.values.begin(), s.p.values.end(), x0.begin() + p0);
  set_constrained_values(x0, cs);
  SolveStats st;
  const auto x = fgmres(op, pre, rhs, cfg_.solver, &st, x0);
  if (stats) stats->saddle = st;

  next.p = FieldVector(d_->pressure());
  std::copy(x.begin() + p0, x.begin() + p0 + np, next.p.values.begin());
  for (int k = 0; k < m; ++k) {
    next.phases[k].u = FieldVector(d_->velocity());
    std::copy(x.begin() + static_cast<std::ptrdiff_t>(k) * nv, x.begin() + static_cast<std::ptrdiff_t>(k + 1) * nv,
              next.phases[k].u.values.begin());
    const auto uq = eval_vector(next.phases[k].u, qc);
    next.phases[k].uhat.resize(qc.size());
    for (std::size_t i = 0; i < qc.size(); ++i) next.phases[k].uhat[i] = uq[i].value;
  }
  for (double v : x)
    if (!std::isfinite(v)) throw std::runtime_error("non-finite values at step " + std::to_string(next.step));

  if (stats) {
    std::vector<Vec2> flux(qc.size());
    for (int k = 0; k < m; ++k)
      for (std::size_t i = 0; i < qc.size(); ++i) flux[i] += a1[k][i] * next.phases[k].uhat[i];
    const auto dv = assemble_vector(ps, qc, [&](const QuadPoint& qp) {
      const Vec2 f = flux[qp.index];
      return [f](const Shape& v) { return dot(f, v.grad); };
    });
    stats->divergence_max = norm_inf(dv);
  }
  return next;
}

}  // namespace mpfs
