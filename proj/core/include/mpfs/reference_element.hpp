#pragma once

#include <array>
#include <span>
#include <vector>

#include "mpfs/geometry.hpp"

namespace mpfs {

// Reference square [-1,1]^2. Local numbering is counterclockwise:
//
//   3 --- 6 --- 2
//   |           |
//   7     8     5
//   |           |
//   0 --- 4 --- 1
//
// Corners 0..3, then the midpoints of edges 0..3 (edge k runs from corner k
// to corner k+1 mod 4), then the centre. Q1 uses the corners only. This is the
// VTK quad / biquadratic-quad ordering.

inline constexpr int kMaxLocalNodes = 9;

/// Number of local nodes of a tensor Lagrange element of the given degree.
constexpr int local_node_count(int degree) { return (degree + 1) * (degree + 1); }

/// Tensor indices (i, j) of local node `k` in the 1D node set of `degree`.
std::array<int, 2> tensor_index(int degree, int local_node);

/// Reference coordinates of local node `k`.
Vec2 reference_node(int degree, int local_node);

/// Local node ids on local edge `edge`, ordered from its start corner to its end corner.
std::vector<int> edge_local_nodes(int degree, int edge);

/// Outward reference normal of local edge `edge`.
Vec2 reference_edge_normal(int edge);

/// Values, gradients and second derivatives of all basis functions at one point.
struct BasisEval {
  int count = 0;
  std::array<double, kMaxLocalNodes> value{};
  std::array<Vec2, kMaxLocalNodes> grad{};
  std::array<Hess2, kMaxLocalNodes> hess{};
};

/// Evaluate the Q1 or Q2 Lagrange basis at reference point `xi`.
BasisEval evaluate_basis(int degree, const Vec2& xi);

}  // namespace mpfs
