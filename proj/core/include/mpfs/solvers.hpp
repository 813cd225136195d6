#pragma once

#include <functional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpfs/sparse.hpp"

namespace mpfs {

enum class Preconditioner { None, Diagonal };

struct SolverSettings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-30;
  int max_iter = 20000;
  Preconditioner precond = Preconditioner::Diagonal;
  int restart = 60;
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;   ///< ||b - A x||_2, recomputed with a fresh product
  double rhs_norm = 0.0;
  std::string method;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : std::runtime_error(format(what, residual, iterations)),
        residual_(residual),
        iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  static std::string format(const std::string& what, double residual, int iterations) {
    std::ostringstream os;
    os << what << " (residual " << residual << " after " << iterations << " iterations)";
    return os.str();
  }

  double residual_;
  int iterations_;
};

/// Preconditioned conjugate gradients for symmetric positive definite A.
std::vector<double> solve_spd(const SparseMatrix& a, std::span<const double> b, const SolverSettings& s,
                              SolveStats* stats = nullptr, std::span<const double> x0 = {});

/// BiCGSTAB, falling back to restarted GMRES on breakdown or stagnation.
std::vector<double> solve_nonsymmetric(const SparseMatrix& a, std::span<const double> b, const SolverSettings& s,
                                       SolveStats* stats = nullptr, std::span<const double> x0 = {});

/// Symmetric semidefinite A whose kernel is the constants (pure Neumann problems).
/// `weights[i]` is the integral of basis function i; b is projected onto the range
/// of A and the result has zero weighted mean sum_i weights[i] x[i].
std::vector<double> solve_singular_neumann(const SparseMatrix& a, std::span<const double> b,
                                           std::span<const double> weights, const SolverSettings& s,
                                           SolveStats* stats = nullptr, std::span<const double> x0 = {});

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

/// Flexible restarted GMRES with a (possibly variable) right preconditioner.
std::vector<double> fgmres(const LinearOperator& a, const LinearOperator& precond, std::span<const double> b,
                           const SolverSettings& s, SolveStats* stats = nullptr, std::span<const double> x0 = {});

}  // namespace mpfs
