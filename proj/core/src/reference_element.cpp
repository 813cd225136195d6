#include "mpfs/reference_element.hpp"

#include <stdexcept>

namespace mpfs {

namespace {

constexpr std::array<std::array<int, 2>, 4> kQ1Index{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
constexpr std::array<std::array<int, 2>, 9> kQ2Index{
    {{0, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 0}, {2, 1}, {1, 2}, {0, 1}, {1, 1}}};

void check_degree(int degree) {
  if (degree != 1 && degree != 2) throw std::invalid_argument("only Q1 and Q2 elements are supported");
}

double node_1d(int degree, int i) { return degree == 1 ? (i == 0 ? -1.0 : 1.0) : static_cast<double>(i - 1); }

struct Lagrange1D {
  std::array<double, 3> v{};
  std::array<double, 3> d{};
  std::array<double, 3> dd{};
};

Lagrange1D lagrange_1d(int degree, double s) {
  Lagrange1D l;
  if (degree == 1) {
    l.v = {0.5 * (1.0 - s), 0.5 * (1.0 + s), 0.0};
    l.d = {-0.5, 0.5, 0.0};
  } else {
    l.v = {0.5 * s * (s - 1.0), 1.0 - s * s, 0.5 * s * (s + 1.0)};
    l.d = {s - 0.5, -2.0 * s, s + 0.5};
    l.dd = {1.0, -2.0, 1.0};
  }
  return l;
}

}  // namespace

std::array<int, 2> tensor_index(int degree, int local_node) {
  check_degree(degree);
  if (local_node < 0 || local_node >= local_node_count(degree)) throw std::out_of_range("local node id");
  return degree == 1 ? kQ1Index[local_node] : kQ2Index[local_node];
}

Vec2 reference_node(int degree, int local_node) {
  const auto ij = tensor_index(degree, local_node);
  return {node_1d(degree, ij[0]), node_1d(degree, ij[1])};
}

std::vector<int> edge_local_nodes(int degree, int edge) {
  check_degree(degree);
  const int a = edge % 4;
  const int b = (edge + 1) % 4;
  if (degree == 1) return {a, b};
  return {a, 4 + a, b};
}

Vec2 reference_edge_normal(int edge) {
  switch (edge % 4) {
    case 0: return {0.0, -1.0};
    case 1: return {1.0, 0.0};
    case 2: return {0.0, 1.0};
    default: return {-1.0, 0.0};
  }
}

BasisEval evaluate_basis(int degree, const Vec2& xi) {
  check_degree(degree);
  const Lagrange1D lx = lagrange_1d(degree, xi.x);
  const Lagrange1D ly = lagrange_1d(degree, xi.y);
  BasisEval out;
  out.count = local_node_count(degree);
  for (int k = 0; k < out.count; ++k) {
    const auto [i, j] = degree == 1 ? kQ1Index[k] : kQ2Index[k];
    out.value[k] = lx.v[i] * ly.v[j];
    out.grad[k] = {lx.d[i] * ly.v[j], lx.v[i] * ly.d[j]};
    out.hess[k] = {lx.dd[i] * ly.v[j], lx.d[i] * ly.d[j], lx.v[i] * ly.dd[j]};
  }
  return out;
}

}  // namespace mpfs
