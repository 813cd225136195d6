#include "mpfs/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpfs/log.hpp"

namespace mpfs {

namespace {

std::vector<double> inverse_diagonal(const SparseMatrix& a, Preconditioner p) {
  std::vector<double> d(a.rows(), 1.0);
  if (p == Preconditioner::Diagonal) {
    const auto diag = a.diagonal();
    for (int i = 0; i < a.rows(); ++i) d[i] = diag[i] != 0.0 ? 1.0 / diag[i] : 1.0;
  }
  return d;
}

std::vector<double> residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b) {
  std::vector<double> r = a * x;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return r;
}

double target(const SolverSettings& s, double bnorm) { return std::max(s.rel_tol * bnorm, s.abs_tol); }

void check_settings(const SparseMatrix& a, std::span<const double> b, const SolverSettings& s) {
  if (!(s.rel_tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  if (a.rows() != a.cols() || static_cast<int>(b.size()) != a.rows()) throw std::invalid_argument("solver dimension mismatch");
}

void finish(SolveStats* stats, const char* method, int it, double res, double bnorm) {
  if (stats) *stats = {it, res, bnorm, method};
}

// PCG on A x = b; `project` (optional) removes kernel components from residual-like vectors.
std::vector<double> pcg(const SparseMatrix& a, std::span<const double> b, const SolverSettings& s, SolveStats* stats,
                        std::span<const double> x0, const std::function<void(std::span<double>)>& project) {
  const int n = a.rows();
  const double bnorm = norm2(b);
  const double tol = target(s, bnorm);
  std::vector<double> x(n, 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), x.begin());
  const auto dinv = inverse_diagonal(a, s.precond);
  std::vector<double> r = residual(a, x, b);
  std::vector<double> z(n), p(n), ap(n);
  int it = 0;
  double rn = norm2(r);
  while (it < s.max_iter) {
    if (rn <= tol) {
      // recheck with a fresh product
      r = residual(a, x, b);
      if (project) project(r);
      rn = norm2(r);
      if (rn <= tol) break;
    }
    for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    if (project) project(z);
    p = z;
    double rz = dot(r, z);
    while (it < s.max_iter) {
      a.multiply(p, ap);
      const double pap = dot(p, ap);
      if (!(pap > 0.0)) throw SolverError("conjugate gradients: matrix is not positive definite", rn, it);
      const double alpha = rz / pap;
      axpy(alpha, p, x);
      axpy(-alpha, ap, r);
      ++it;
      rn = norm2(r);
      if (rn <= tol) break;
      for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
      if (project) project(z);
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
  }
  r = residual(a, x, b);
  if (project) project(r);
  rn = norm2(r);
  finish(stats, "cg", it, rn, bnorm);
  if (!(rn <= tol)) throw SolverError("conjugate gradients did not converge", rn, it);
  return x;
}

}  // namespace

std::vector<double> solve_spd(const SparseMatrix& a, std::span<const double> b, const SolverSettings& s,
                              SolveStats* stats, std::span<const double> x0) {
  check_settings(a, b, s);
  return pcg(a, b, s, stats, x0, {});
}

std::vector<double> solve_singular_neumann(const SparseMatrix& a, std::span<const double> b,
                                           std::span<const double> w, const SolverSettings& s, SolveStats* stats,
                                           std::span<const double> x0) {
  check_settings(a, b, s);
  const int n = a.rows();
  if (static_cast<int>(w.size()) != n) throw std::invalid_argument("weight vector length mismatch");
  const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
  // range of A is orthogonal to the constants: b <- b - (1^T b / 1^T w) w
  std::vector<double> bp(b.begin(), b.end());
  const double bsum = std::accumulate(bp.begin(), bp.end(), 0.0);
  double babs = 0.0;
  for (double v : bp) babs += std::abs(v);
  if (std::abs(bsum) > 1e-8 * babs && babs > 0.0)
    warn("Neumann right-hand side has a constant component of relative size " + std::to_string(bsum / babs) +
         "; projecting it out");
  for (int i = 0; i < n; ++i) bp[i] -= bsum / wsum * w[i];
  auto project_range = [&](std::span<double> v) {
    const double vs = std::accumulate(v.begin(), v.end(), 0.0);
    for (int i = 0; i < n; ++i) v[i] -= vs / wsum * w[i];
  };
  std::vector<double> x = pcg(a, bp, s, stats, x0, project_range);
  const double mean = dot(w, x) / wsum;
  for (double& v : x) v -= mean;
  return x;
}

std::vector<double> fgmres(const LinearOperator& a, const LinearOperator& precond, std::span<const double> b,
                           const SolverSettings& s, SolveStats* stats, std::span<const double> x0) {
  const std::size_t n = b.size();
  const int m = std::max(1, s.restart);
  const double bnorm = norm2(b);
  const double tol = target(s, bnorm);
  std::vector<double> x(n, 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), x.begin());
  std::vector<std::vector<double>> v(m + 1, std::vector<double>(n));
  std::vector<std::vector<double>> z(m, std::vector<double>(n));
  std::vector<double> h(static_cast<std::size_t>(m + 1) * m), cs(m), sn(m), g(m + 1), y(m), r(n);
  auto H = [&](int i, int j) -> double& { return h[static_cast<std::size_t>(i) * m + j]; };
  int it = 0;
  double rn = 0.0;
  while (true) {
    a(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    rn = norm2(r);
    if (rn <= tol || it >= s.max_iter) break;
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / rn;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = rn;
    int k = 0;
    for (; k < m && it < s.max_iter; ++k) {
      ++it;
      precond(v[k], z[k]);
      a(z[k], v[k + 1]);
      for (int i = 0; i <= k; ++i) {
        H(i, k) = dot(v[k + 1], v[i]);
        axpy(-H(i, k), v[i], v[k + 1]);
      }
      const double hn = norm2(v[k + 1]);
      H(k + 1, k) = hn;
      if (hn > 0.0)
        for (double& t : v[k + 1]) t /= hn;
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
        H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t;
      }
      const double d = std::hypot(H(k, k), H(k + 1, k));
      cs[k] = d > 0.0 ? H(k, k) / d : 1.0;
      sn[k] = d > 0.0 ? H(k + 1, k) / d : 0.0;
      H(k, k) = d;
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) <= tol || hn == 0.0) {
        ++k;
        break;
      }
    }
    for (int i = k - 1; i >= 0; --i) {
      double t = g[i];
      for (int j = i + 1; j < k; ++j) t -= H(i, j) * y[j];
      y[i] = H(i, i) != 0.0 ? t / H(i, i) : 0.0;
    }
    for (int j = 0; j < k; ++j) axpy(y[j], z[j], x);
  }
  finish(stats, "fgmres", it, rn, bnorm);
  if (!(rn <= tol)) throw SolverError("GMRES did not converge", rn, it);
  return x;
}

std::vector<double> solve_nonsymmetric(const SparseMatrix& a, std::span<const double> b, const SolverSettings& s,
                                       SolveStats* stats, std::span<const double> x0) {
  check_settings(a, b, s);
  const int n = a.rows();
  const double bnorm = norm2(b);
  const double tol = target(s, bnorm);
  const auto dinv = inverse_diagonal(a, s.precond);
  std::vector<double> x(n, 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), x.begin());
  std::vector<double> r = residual(a, x, b);
  std::vector<double> rhat = r, p(n, 0.0), v(n, 0.0), ph(n), sv(n), sh(n), t(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  int it = 0;
  double rn = norm2(r);
  bool breakdown = false;
  while (rn > tol && it < s.max_iter) {
    const double rho_new = dot(rhat, r);
    if (std::abs(rho_new) < 1e-300 || omega == 0.0) {
      breakdown = true;
      break;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    for (int i = 0; i < n; ++i) ph[i] = dinv[i] * p[i];
    a.multiply(ph, v);
    const double rv = dot(rhat, v);
    if (rv == 0.0) {
      breakdown = true;
      break;
    }
    alpha = rho / rv;
    for (int i = 0; i < n; ++i) sv[i] = r[i] - alpha * v[i];
    ++it;
    if (norm2(sv) <= tol) {
      axpy(alpha, ph, x);
      r = residual(a, x, b);
      rn = norm2(r);
      if (rn <= tol) break;
      rhat = r;
      rho = alpha = omega = 1.0;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
      continue;
    }
    for (int i = 0; i < n; ++i) sh[i] = dinv[i] * sv[i];
    a.multiply(sh, t);
    const double tt = dot(t, t);
    omega = tt > 0.0 ? dot(t, sv) / tt : 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * ph[i] + omega * sh[i];
      r[i] = sv[i] - omega * t[i];
    }
    rn = norm2(r);
    if (rn <= tol) {
      r = residual(a, x, b);
      rn = norm2(r);
    }
  }
  if (!breakdown && rn <= tol) {
    finish(stats, "bicgstab", it, rn, bnorm);
    return x;
  }
  // fall back to restarted GMRES from the current iterate
  SolverSettings gs = s;
  gs.max_iter = std::max(1, s.max_iter - it);
  const LinearOperator op = [&](std::span<const double> in, std::span<double> out) { a.multiply(in, out); };
  const LinearOperator pc = [&](std::span<const double> in, std::span<double> out) {
    for (int i = 0; i < n; ++i) out[i] = dinv[i] * in[i];
  };
  SolveStats gstats;
  try {
    x = fgmres(op, pc, b, gs, &gstats, x);
  } catch (const SolverError& e) {
    finish(stats, "gmres", it + e.iterations(), e.residual(), bnorm);
    throw;
  }
  const double true_res = norm2(residual(a, x, b));
  finish(stats, "gmres", it + gstats.iterations, true_res, bnorm);
  if (!(true_res <= tol)) throw SolverError("GMRES residual check failed", true_res, it + gstats.iterations);
  return x;
}

}  // namespace mpfs
