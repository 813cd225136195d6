#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "mpfs/geometry.hpp"

namespace mpfs {

struct BoundaryFacet {
  int element = 0;
  int local_edge = 0;
  std::string marker;
};

/// Conforming quadrilateral mesh with Q1 or Q2 isoparametric geometry.
///
/// Element node lists follow the reference-element numbering (corners first,
/// counterclockwise). Immutable once built.
class Mesh {
 public:
  Mesh(int geometric_degree, std::vector<Vec2> nodes, std::vector<std::array<int, 9>> elements,
       std::vector<BoundaryFacet> boundary_facets);

  int geometric_degree() const { return geometric_degree_; }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Vec2>& nodes() const { return nodes_; }
  const std::array<int, 9>& element_nodes(int e) const { return elements_[e]; }
  const std::vector<BoundaryFacet>& boundary_facets() const { return facets_; }
  std::vector<std::string> markers() const;

  // Topology: vertices are the distinct corner nodes, edges are vertex pairs.
  int num_vertices() const { return num_vertices_; }
  int num_edges() const { return num_edges_; }
  const std::array<int, 4>& element_vertices(int e) const { return element_vertices_[e]; }
  const std::array<int, 4>& element_edges(int e) const { return element_edges_[e]; }
  int edge_of_facet(const BoundaryFacet& f) const { return element_edges_[f.element][f.local_edge]; }

  Vec2 map(int e, const Vec2& xi) const;
  Mat2 jacobian(int e, const Vec2& xi) const;

  /// Area computed with a Gauss rule of the given order.
  double area(int quad_order = 6) const;
  /// Smallest Jacobian determinant over the quadrature points of a rule.
  double min_jacobian(int quad_order = 6) const;

 private:
  void build_topology();

  int geometric_degree_;
  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 9>> elements_;
  std::vector<BoundaryFacet> facets_;
  int num_vertices_ = 0;
  int num_edges_ = 0;
  std::vector<std::array<int, 4>> element_vertices_;
  std::vector<std::array<int, 4>> element_edges_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Side labels in the order bottom, right, top, left.
using SideMarkers = std::array<std::string, 4>;

MeshPtr build_rectangle(int nx, int ny, std::array<double, 2> x_range, std::array<double, 2> y_range,
                        const SideMarkers& markers = {"bottom", "right", "top", "left"},
                        int geometric_degree = 1);

/// Polar-map annulus, periodic in the angle, markers "inner"/"outer".
/// Degree-1 geometry gives straight-sided cells with vertices on the circles.
MeshPtr build_annulus(int nr, int ntheta, double r_inner, double r_outer, int geometric_degree = 2);

/// Five-block O-grid disk: n_core x n_core square core and four ring blocks of
/// n_core x n_ring elements. Q2 geometry, marker "boundary".
MeshPtr build_disk(int n_ring, int n_core, double radius);

/// Write the mesh as a legacy VTK unstructured grid.
void write_vtk_mesh(const Mesh& mesh, const std::string& path);

namespace detail {

/// DATASET, POINTS, CELLS and CELL_TYPES sections of a legacy VTK file.
void write_vtk_geometry(std::ostream& out, const Mesh& mesh);

/// A structured block: maps the unit square onto the physical domain.
struct Block {
  int ns = 1;
  int nt = 1;
  std::function<Vec2(double, double)> map;
};

/// Merge blocks into a conforming mesh. Coincident nodes are identified by
/// position; boundary edges get the label returned by `classify(midpoint)`.
MeshPtr merge_blocks(const std::vector<Block>& blocks, int geometric_degree,
                     const std::function<std::string(const Vec2&)>& classify);

}  // namespace detail

}  // namespace mpfs
