#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "mpfs/mesh.hpp"
#include "mpfs/quadrature.hpp"

using namespace mpfs;

TEST(Rectangle, SingleElement) {
  auto m = build_rectangle(1, 1, {0, 1}, {0, 1});
  EXPECT_EQ(m->num_elements(), 1);
  EXPECT_EQ(m->num_nodes(), 4);
  EXPECT_EQ(m->geometric_degree(), 1);
  EXPECT_EQ(m->boundary_facets().size(), 4u);
  std::set<std::string> labels;
  for (const auto& f : m->boundary_facets()) labels.insert(f.marker);
  EXPECT_EQ(labels, (std::set<std::string>{"bottom", "right", "top", "left"}));
}

TEST(Rectangle, RayleighTaylorResolution) {
  auto m = build_rectangle(100, 800, {0, 0.5}, {-2, 2});
  EXPECT_EQ(m->num_elements(), 80000);
  EXPECT_NEAR(m->area(2), 2.0, 1e-10);
}

TEST(Rectangle, InteriorNodeSharedByFour) {
  auto m = build_rectangle(2, 2, {0, 1}, {0, 1});
  EXPECT_EQ(m->num_nodes(), 9);
  int centre = -1;
  for (int i = 0; i < m->num_nodes(); ++i)
    if (std::abs(m->nodes()[i].x - 0.5) < 1e-14 && std::abs(m->nodes()[i].y - 0.5) < 1e-14) centre = i;
  ASSERT_GE(centre, 0);
  int uses = 0;
  for (int e = 0; e < m->num_elements(); ++e)
    for (int k = 0; k < 4; ++k) uses += m->element_nodes(e)[k] == centre;
  EXPECT_EQ(uses, 4);
  EXPECT_EQ(m->num_edges(), 12);
  EXPECT_EQ(m->boundary_facets().size(), 8u);
}

TEST(Rectangle, SideMarkersFollowRequest) {
  auto m = build_rectangle(3, 2, {0, 3}, {0, 2}, {"b", "r", "t", "l"});
  for (const auto& f : m->boundary_facets()) {
    const auto& nodes = m->element_nodes(f.element);
    const Vec2 a = m->nodes()[nodes[f.local_edge]];
    const Vec2 b = m->nodes()[nodes[(f.local_edge + 1) % 4]];
    const Vec2 mid = 0.5 * (a + b);
    if (mid.y == 0.0) EXPECT_EQ(f.marker, "b");
    if (mid.x == 3.0) EXPECT_EQ(f.marker, "r");
    if (mid.y == 2.0) EXPECT_EQ(f.marker, "t");
    if (mid.x == 0.0) EXPECT_EQ(f.marker, "l");
  }
}

TEST(Rectangle, RejectsDegenerateRange) {
  EXPECT_THROW(build_rectangle(2, 2, {1, 1}, {0, 1}), std::invalid_argument);
  EXPECT_THROW(build_rectangle(2, 2, {0, 1}, {2, -1}), std::invalid_argument);
  EXPECT_THROW(build_rectangle(0, 2, {0, 1}, {0, 1}), std::invalid_argument);
}

TEST(Annulus, CoarsestRing) {
  auto m = build_annulus(1, 4, 1.0, 2.0);
  EXPECT_EQ(m->num_elements(), 4);
  EXPECT_GT(m->min_jacobian(6), 0.0);
  // seam is closed: only inner and outer boundary edges
  EXPECT_EQ(m->boundary_facets().size(), 8u);
  EXPECT_EQ(m->markers(), (std::vector<std::string>{"inner", "outer"}));
}

TEST(Annulus, FullResolutionCount) {
  auto m = build_annulus(64, 384, 0.25, 0.75);
  EXPECT_EQ(m->num_elements(), 24576);
}

TEST(Annulus, AreaAgainstAnalytic) {
  auto m = build_annulus(2, 8, 0.25, 0.75);
  const double exact = std::numbers::pi * (0.75 * 0.75 - 0.25 * 0.25);
  EXPECT_LT(std::abs(m->area(6) - exact) / exact, 1e-3);
}

TEST(Annulus, RejectsBadRadii) {
  EXPECT_THROW(build_annulus(2, 8, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(build_annulus(2, 8, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(build_annulus(2, 2, 0.5, 1.0), std::invalid_argument);
}

TEST(Disk, CoarsestOGrid) {
  auto m = build_disk(1, 1, 1.0);
  EXPECT_EQ(m->num_elements(), 5);
  EXPECT_GT(m->min_jacobian(6), 0.0);
  EXPECT_EQ(m->markers(), (std::vector<std::string>{"boundary"}));
}

TEST(Disk, FullResolutionCount) {
  auto m = build_disk(32, 64, 1.0);
  EXPECT_EQ(m->num_elements(), 12288);
}

TEST(Disk, AreaAgainstAnalytic) {
  auto m = build_disk(4, 4, 1.0);
  EXPECT_LT(std::abs(m->area(6) - std::numbers::pi), 1e-3);
}

TEST(Disk, AreaConvergesAtLeastSecondOrder) {
  std::vector<double> err;
  for (int n : {2, 4, 8}) err.push_back(std::abs(build_disk(n, n, 1.0)->area(6) - std::numbers::pi));
  EXPECT_GE(std::log2(err[0] / err[1]), 2.0);
  EXPECT_GE(std::log2(err[1] / err[2]), 2.0);
}

TEST(Meshes, PositiveJacobiansForAllRuleOrders) {
  for (const auto& m : {build_disk(2, 3, 1.0), build_annulus(2, 6, 0.25, 0.75), build_rectangle(3, 2, {0, 1}, {0, 2})})
    for (int order = 0; order <= 6; ++order) EXPECT_GT(m->min_jacobian(order), 0.0);
}

TEST(Meshes, BoundaryFacetsHaveOneMarkerAndInteriorNone) {
  auto m = build_disk(2, 2, 1.0);
  std::vector<int> count(m->num_edges(), 0);
  for (int e = 0; e < m->num_elements(); ++e)
    for (int k = 0; k < 4; ++k) ++count[m->element_edges(e)[k]];
  std::vector<int> marked(m->num_edges(), 0);
  for (const auto& f : m->boundary_facets()) ++marked[m->edge_of_facet(f)];
  for (int i = 0; i < m->num_edges(); ++i) EXPECT_EQ(marked[i], count[i] == 1 ? 1 : 0);
}

TEST(Meshes, RejectsNonConformingMidsideNodes) {
  // two Q2 elements sharing an edge but with different midside nodes
  std::vector<Vec2> nodes;
  for (int j = 0; j <= 2; ++j)
    for (int i = 0; i <= 4; ++i) nodes.push_back({0.5 * i, 0.5 * j});
  nodes.push_back({1.0, 0.5});  // duplicate of node 7
  auto id = [](int i, int j) { return j * 5 + i; };
  std::array<int, 9> a{id(0, 0), id(2, 0), id(2, 2), id(0, 2), id(1, 0), id(2, 1), id(1, 2), id(0, 1), id(1, 1)};
  std::array<int, 9> b{id(2, 0), id(4, 0), id(4, 2), id(2, 2), id(3, 0), id(4, 1), id(3, 2), 15, id(3, 1)};
  std::vector<BoundaryFacet> facets{{0, 0, "w"}, {0, 2, "w"}, {0, 3, "w"}, {1, 0, "w"}, {1, 1, "w"}, {1, 2, "w"}};
  EXPECT_THROW(Mesh(2, nodes, {a, b}, facets), std::runtime_error);
  b[7] = id(2, 1);
  EXPECT_NO_THROW(Mesh(2, nodes, {a, b}, facets));
}

TEST(Quadrature, GaussLegendreExactness) {
  for (int order = 0; order <= 9; ++order) {
    const auto rule = gauss_rule(order);
    for (int px = 0; px <= order; ++px) {
      double s = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * std::pow(rule.points[q].x, px);
      const double exact = px % 2 ? 0.0 : 2.0 * 2.0 / (px + 1);
      EXPECT_NEAR(s, exact, 1e-13) << "order " << order << " power " << px;
    }
  }
}
