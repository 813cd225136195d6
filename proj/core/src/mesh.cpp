#include "mpfs/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "mpfs/quadrature.hpp"
#include "mpfs/reference_element.hpp"

namespace mpfs {

Mesh::Mesh(int geometric_degree, std::vector<Vec2> nodes, std::vector<std::array<int, 9>> elements,
           std::vector<BoundaryFacet> boundary_facets)
    : geometric_degree_(geometric_degree),
      nodes_(std::move(nodes)),
      elements_(std::move(elements)),
      facets_(std::move(boundary_facets)) {
  if (geometric_degree_ != 1 && geometric_degree_ != 2) throw std::invalid_argument("geometric degree must be 1 or 2");
  const int nloc = local_node_count(geometric_degree_);
  for (const auto& el : elements_)
    for (int k = 0; k < nloc; ++k)
      if (el[k] < 0 || el[k] >= num_nodes()) throw std::invalid_argument("element references unknown node");
  build_topology();
  const double jmin = min_jacobian(6);
  if (!(jmin > 0.0)) throw std::runtime_error("mesh has a non-positive Jacobian determinant");
}

void Mesh::build_topology() {
  const int ne = num_elements();
  std::vector<int> vertex_of_node(nodes_.size(), -1);
  element_vertices_.resize(ne);
  num_vertices_ = 0;
  for (int e = 0; e < ne; ++e) {
    for (int c = 0; c < 4; ++c) {
      int& v = vertex_of_node[elements_[e][c]];
      if (v < 0) v = num_vertices_++;
      element_vertices_[e][c] = v;
    }
  }

  struct EdgeInfo {
    int id = -1;
    int count = 0;
    int mid_node = -1;
  };
  std::map<std::pair<int, int>, EdgeInfo> edges;
  element_edges_.resize(ne);
  num_edges_ = 0;
  for (int e = 0; e < ne; ++e) {
    for (int k = 0; k < 4; ++k) {
      const int a = element_vertices_[e][k];
      const int b = element_vertices_[e][(k + 1) % 4];
      if (a == b) throw std::runtime_error("degenerate element edge");
      auto& info = edges[{std::min(a, b), std::max(a, b)}];
      if (info.id < 0) info.id = num_edges_++;
      ++info.count;
      if (info.count > 2) throw std::runtime_error("non-manifold edge shared by more than two elements");
      if (geometric_degree_ == 2) {
        const int mid = elements_[e][4 + k];
        if (info.mid_node < 0)
          info.mid_node = mid;
        else if (info.mid_node != mid)
          throw std::runtime_error("non-conforming edge: midside nodes differ");
      }
      element_edges_[e][k] = info.id;
    }
  }

  std::vector<int> edge_count(num_edges_, 0);
  for (const auto& [key, info] : edges) edge_count[info.id] = info.count;
  std::vector<int> marked(num_edges_, 0);
  for (const auto& f : facets_) {
    if (f.element < 0 || f.element >= ne || f.local_edge < 0 || f.local_edge > 3)
      throw std::invalid_argument("boundary facet references unknown element or edge");
    if (f.marker.empty()) throw std::invalid_argument("boundary facet without marker");
    const int id = element_edges_[f.element][f.local_edge];
    if (edge_count[id] != 1) throw std::invalid_argument("interior edge carries a boundary marker");
    if (++marked[id] > 1) throw std::invalid_argument("boundary edge marked more than once");
  }
  for (int id = 0; id < num_edges_; ++id)
    if (edge_count[id] == 1 && marked[id] != 1) throw std::invalid_argument("boundary edge without marker");
}

std::vector<std::string> Mesh::markers() const {
  std::set<std::string> s;
  for (const auto& f : facets_) s.insert(f.marker);
  return {s.begin(), s.end()};
}

Vec2 Mesh::map(int e, const Vec2& xi) const {
  const BasisEval b = evaluate_basis(geometric_degree_, xi);
  Vec2 x;
  for (int k = 0; k < b.count; ++k) x += b.value[k] * nodes_[elements_[e][k]];
  return x;
}

Mat2 Mesh::jacobian(int e, const Vec2& xi) const {
  const BasisEval b = evaluate_basis(geometric_degree_, xi);
  Mat2 j;
  for (int k = 0; k < b.count; ++k) {
    const Vec2& p = nodes_[elements_[e][k]];
    j(0, 0) += p.x * b.grad[k].x;
    j(0, 1) += p.x * b.grad[k].y;
    j(1, 0) += p.y * b.grad[k].x;
    j(1, 1) += p.y * b.grad[k].y;
  }
  return j;
}

double Mesh::area(int quad_order) const {
  const QuadratureRule rule = gauss_rule(quad_order);
  double a = 0.0;
  for (int e = 0; e < num_elements(); ++e)
    for (std::size_t q = 0; q < rule.size(); ++q) a += rule.weights[q] * jacobian(e, rule.points[q]).det();
  return a;
}

double Mesh::min_jacobian(int quad_order) const {
  const QuadratureRule rule = gauss_rule(quad_order);
  double m = std::numeric_limits<double>::infinity();
  for (int e = 0; e < num_elements(); ++e) {
    for (const auto& p : rule.points) m = std::min(m, jacobian(e, p).det());
    for (int c = 0; c < 4; ++c) m = std::min(m, jacobian(e, reference_node(1, c)).det());
  }
  return m;
}

namespace detail {

namespace {

class NodeIndex {
 public:
  explicit NodeIndex(double tol) : tol_(tol) {}

  int insert(const Vec2& p, std::vector<Vec2>& nodes) {
    const long long ix = std::llround(p.x / tol_);
    const long long iy = std::llround(p.y / tol_);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = index_.find(key(ix + dx, iy + dy));
        if (it == index_.end()) continue;
        for (int id : it->second)
          if (std::abs(nodes[id].x - p.x) <= tol_ && std::abs(nodes[id].y - p.y) <= tol_) return id;
      }
    const int id = static_cast<int>(nodes.size());
    nodes.push_back(p);
    index_[key(ix, iy)].push_back(id);
    return id;
  }

 private:
  static std::pair<long long, long long> key(long long a, long long b) { return {a, b}; }
  struct Hash {
    std::size_t operator()(const std::pair<long long, long long>& k) const {
      return std::hash<long long>()(k.first * 1000003LL ^ k.second);
    }
  };
  double tol_;
  std::unordered_map<std::pair<long long, long long>, std::vector<int>, Hash> index_;
};

}  // namespace

MeshPtr merge_blocks(const std::vector<Block>& blocks, int degree,
                     const std::function<std::string(const Vec2&)>& classify) {
  double extent = 0.0;
  for (const auto& b : blocks)
    for (double s : {0.0, 0.5, 1.0})
      for (double t : {0.0, 0.5, 1.0}) {
        const Vec2 p = b.map(s, t);
        extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
      }
  NodeIndex index(1e-9 * std::max(extent, 1.0));
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 9>> elements;
  const int nloc = local_node_count(degree);

  for (const auto& b : blocks) {
    if (b.ns < 1 || b.nt < 1) throw std::invalid_argument("block needs at least one element per direction");
    const int gs = degree * b.ns + 1;
    const int gt = degree * b.nt + 1;
    std::vector<int> grid(static_cast<std::size_t>(gs) * gt);
    for (int j = 0; j < gt; ++j)
      for (int i = 0; i < gs; ++i)
        grid[j * gs + i] = index.insert(b.map(double(i) / (gs - 1), double(j) / (gt - 1)), nodes);
    for (int ej = 0; ej < b.nt; ++ej)
      for (int ei = 0; ei < b.ns; ++ei) {
        std::array<int, 9> el{};
        el.fill(-1);
        for (int k = 0; k < nloc; ++k) {
          const auto [a, c] = tensor_index(degree, k);
          el[k] = grid[(degree * ej + c) * gs + degree * ei + a];
        }
        elements.push_back(el);
      }
  }

  // boundary edges are those referenced by exactly one element
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edge_users;
  for (int e = 0; e < static_cast<int>(elements.size()); ++e)
    for (int k = 0; k < 4; ++k) {
      const int a = elements[e][k];
      const int b = elements[e][(k + 1) % 4];
      edge_users[{std::min(a, b), std::max(a, b)}].push_back({e, k});
    }
  std::vector<BoundaryFacet> facets;
  for (const auto& [key, users] : edge_users) {
    if (users.size() != 1) continue;
    const auto [e, k] = users.front();
    // midside node lies on curved boundaries; the chord midpoint does not
    const Vec2 mid = degree == 2 ? nodes[elements[e][4 + k]] : 0.5 * (nodes[key.first] + nodes[key.second]);
    facets.push_back({e, k, classify(mid)});
  }
  std::sort(facets.begin(), facets.end(), [](const BoundaryFacet& l, const BoundaryFacet& r) {
    return l.element != r.element ? l.element < r.element : l.local_edge < r.local_edge;
  });
  return std::make_shared<const Mesh>(degree, std::move(nodes), std::move(elements), std::move(facets));
}

}  // namespace detail

MeshPtr build_rectangle(int nx, int ny, std::array<double, 2> xr, std::array<double, 2> yr,
                        const SideMarkers& markers, int geometric_degree) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("rectangle needs nx, ny >= 1");
  if (!(xr[1] > xr[0]) || !(yr[1] > yr[0]))
    throw std::invalid_argument("degenerate rectangle range: upper bound must exceed lower bound");
  detail::Block b{nx, ny, [=](double s, double t) {
                    return Vec2{xr[0] + s * (xr[1] - xr[0]), yr[0] + t * (yr[1] - yr[0])};
                  }};
  const double hx = (xr[1] - xr[0]) / nx;
  const double hy = (yr[1] - yr[0]) / ny;
  auto classify = [=](const Vec2& m) -> std::string {
    if (std::abs(m.y - yr[0]) < 1e-6 * hy) return markers[0];
    if (std::abs(m.x - xr[1]) < 1e-6 * hx) return markers[1];
    if (std::abs(m.y - yr[1]) < 1e-6 * hy) return markers[2];
    return markers[3];
  };
  return detail::merge_blocks({b}, geometric_degree, classify);
}

MeshPtr build_annulus(int nr, int ntheta, double r_inner, double r_outer, int geometric_degree) {
  if (!(r_inner > 0.0) || !(r_inner < r_outer)) throw std::invalid_argument("annulus needs 0 < r_inner < r_outer");
  if (nr < 1 || ntheta < 3) throw std::invalid_argument("annulus needs nr >= 1 and ntheta >= 3");
  detail::Block b{nr, ntheta, [=](double s, double t) {
                    const double r = r_inner + s * (r_outer - r_inner);
                    const double th = 2.0 * std::numbers::pi * t;
                    return Vec2{r * std::cos(th), r * std::sin(th)};
                  }};
  if (geometric_degree != 1 && geometric_degree != 2) throw std::invalid_argument("geometric degree must be 1 or 2");
  // chord midpoints of the outer circle sit at r_outer cos(pi / ntheta)
  const double r_chord = r_outer * std::cos(std::numbers::pi / ntheta);
  if (!(r_chord > r_inner)) throw std::invalid_argument("annulus too thin for the angular resolution");
  const double rm = 0.5 * (r_inner + r_chord);
  auto classify = [=](const Vec2& m) -> std::string { return norm(m) < rm ? "inner" : "outer"; };
  return detail::merge_blocks({b}, geometric_degree, classify);
}

MeshPtr build_disk(int n_ring, int n_core, double radius) {
  if (n_ring < 1 || n_core < 1) throw std::invalid_argument("disk needs n_ring, n_core >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("disk radius must be positive");
  const double a = 0.5 * radius;
  std::vector<detail::Block> blocks;
  blocks.push_back({n_core, n_core, [=](double s, double t) { return Vec2{-a + 2.0 * a * s, -a + 2.0 * a * t}; }});
  for (int k = 0; k < 4; ++k) {
    const double c = std::cos(k * std::numbers::pi / 2.0);
    const double sn = std::sin(k * std::numbers::pi / 2.0);
    blocks.push_back({n_core, n_ring, [=](double s, double t) {
                        // bottom block, rotated by k quarter turns; t runs from the arc to the core
                        const double th = -0.75 * std::numbers::pi + s * 0.5 * std::numbers::pi;
                        const Vec2 arc{radius * std::cos(th), radius * std::sin(th)};
                        const Vec2 side{-a + 2.0 * a * s, -a};
                        const Vec2 p = (1.0 - t) * arc + t * side;
                        return Vec2{c * p.x - sn * p.y, sn * p.x + c * p.y};
                      }});
  }
  return detail::merge_blocks(blocks, 2, [](const Vec2&) { return std::string("boundary"); });
}

void detail::write_vtk_geometry(std::ostream& out, const Mesh& mesh) {
  const int nloc = local_node_count(mesh.geometric_degree());
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_nodes() << " double\n";
  for (const auto& p : mesh.nodes()) out << p.x << ' ' << p.y << " 0\n";
  out << "CELLS " << mesh.num_elements() << ' ' << mesh.num_elements() * (nloc + 1) << '\n';
  for (int e = 0; e < mesh.num_elements(); ++e) {
    out << nloc;
    for (int k = 0; k < nloc; ++k) out << ' ' << mesh.element_nodes(e)[k];
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.num_elements() << '\n';
  const int type = mesh.geometric_degree() == 1 ? 9 : 28;
  for (int e = 0; e < mesh.num_elements(); ++e) out << type << '\n';
}

void write_vtk_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << "# vtk DataFile Version 3.0\nmesh\nASCII\n";
  detail::write_vtk_geometry(out, mesh);
}

}  // namespace mpfs
