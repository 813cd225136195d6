#pragma once

#include <string>
#include <vector>

#include "mpfs/mesh.hpp"
#include "mpfs/space.hpp"

namespace mpfs {

struct NamedField {
  std::string name;
  FieldVector field;  ///< scalar or two-component; any space on the mesh
};

struct NamedCellData {
  std::string name;
  std::vector<double> values;  ///< one value per element
};

/// Values of component `comp` of a field at every geometry node of its mesh.
std::vector<double> sample_at_nodes(const FieldVector& f, int comp = 0);

/// Legacy ASCII VTK file with fields sampled at the geometry nodes of the mesh.
void write_vtk(const std::string& path, const Mesh& mesh, const std::vector<NamedField>& fields,
               const std::vector<NamedCellData>& cells = {}, const std::string& title = "mpfs");

}  // namespace mpfs
