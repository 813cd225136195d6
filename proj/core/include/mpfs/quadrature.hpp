#pragma once

#include <vector>

#include "mpfs/geometry.hpp"

namespace mpfs {

/// Tensor Gauss-Legendre rule on [-1,1]^2.
struct QuadratureRule {
  int order = 0;            ///< highest polynomial degree per variable integrated exactly
  int points_per_axis = 0;
  std::vector<Vec2> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// 1D Gauss-Legendre nodes and weights on [-1,1].
void gauss_legendre_1d(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Tensor rule exact for polynomials of degree `order` in each variable.
QuadratureRule gauss_rule(int order);

/// Default order for a pairing of spaces with the given degrees: 2*max+2.
constexpr int default_quad_order(int trial_degree, int test_degree) {
  return 2 * (trial_degree > test_degree ? trial_degree : test_degree) + 2;
}

}  // namespace mpfs
