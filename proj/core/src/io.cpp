#include "mpfs/io.hpp"

#include <fstream>
#include <stdexcept>

#include "mpfs/reference_element.hpp"

namespace mpfs {

namespace {

/// First element and local index of every geometry node.
std::vector<std::pair<int, int>> node_owners(const Mesh& mesh) {
  const int nloc = local_node_count(mesh.geometric_degree());
  std::vector<std::pair<int, int>> owner(mesh.num_nodes(), {-1, -1});
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int k = 0; k < nloc; ++k) {
      auto& o = owner[mesh.element_nodes(e)[k]];
      if (o.first < 0) o = {e, k};
    }
  return owner;
}

}  // namespace

std::vector<double> sample_at_nodes(const FieldVector& f, int comp) {
  if (!f.space) throw std::invalid_argument("field without a space");
  const Mesh& mesh = f.space->mesh();
  std::vector<double> out(mesh.num_nodes(), 0.0);
  const auto owner = node_owners(mesh);
  for (std::size_t i = 0; i < owner.size(); ++i) {
    const auto [e, k] = owner[i];
    if (e >= 0) out[i] = eval_at(f, e, reference_node(mesh.geometric_degree(), k), comp);
  }
  return out;
}

void write_vtk(const std::string& path, const Mesh& mesh, const std::vector<NamedField>& fields,
               const std::vector<NamedCellData>& cells, const std::string& title) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\n";
  detail::write_vtk_geometry(out, mesh);

  if (!fields.empty()) out << "POINT_DATA " << mesh.num_nodes() << '\n';
  for (const auto& f : fields) {
    if (!f.field.space || f.field.space->mesh_ptr().get() != &mesh)
      throw std::invalid_argument("field " + f.name + " lives on another mesh");
    if (f.field.space->components() == 1) {
      out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : sample_at_nodes(f.field)) out << v << '\n';
    } else {
      out << "VECTORS " << f.name << " double\n";
      const auto x = sample_at_nodes(f.field, 0);
      const auto y = sample_at_nodes(f.field, 1);
      for (std::size_t i = 0; i < x.size(); ++i) out << x[i] << ' ' << y[i] << " 0\n";
    }
  }
  if (!cells.empty()) out << "CELL_DATA " << mesh.num_elements() << '\n';
  for (const auto& c : cells) {
    if (static_cast<int>(c.values.size()) != mesh.num_elements())
      throw std::invalid_argument("cell data " + c.name + " has the wrong length");
    out << "SCALARS " << c.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : c.values) out << v << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace mpfs
