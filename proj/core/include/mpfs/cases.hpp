#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mpfs/model.hpp"

namespace mpfs {

struct ExactSolution {
  std::vector<TimeScalarFunction> alpha;
  std::vector<TimeVectorFunction> u;
  TimeScalarFunction p;  ///< zero mean over the domain
};

struct CaseDefinition {
  std::string name;
  MeshPtr mesh;
  int velocity_degree = 2;
  int pressure_degree = 1;
  int phase_degree = 1;
  Formulation formulation = Formulation::SqrtVariable;
  FlowProblem problem;
  std::vector<ScalarFunction> alpha0;
  std::vector<VectorFunction> u0;
  std::optional<ExactSolution> exact;
  double tau = 0.1;
  double T = 1.0;
};

struct CaseOptions {
  std::string resolution = "desk";  ///< "desk" or "full"
  /// Mesh size override; zeros keep the resolution default.
  /// disk: (n_ring, n_core); annulus: (n_r, n_theta); rayleigh_taylor: (n_x, n_y).
  std::array<int, 2> mesh_size{0, 0};
  double drag_cap = 1e6;
  /// Geometry degree of curved meshes (1 or 2); 0 keeps the case default.
  int geometric_degree = 0;
};

std::vector<std::string> case_names();

/// Throws std::invalid_argument listing the known cases on an unknown name.
CaseDefinition make_case(const std::string& name, const CaseOptions& opt = {});

/// Unit disk, two phases with alpha = 1/2, linear drag 1/(4(1+t)), rigid counter-rotation.
CaseDefinition case_disk_linear_drag(const CaseOptions& opt = {});
/// Annulus 1/4 < r < 3/4, alpha_1 = r, quadratic drag 4|u_1 - u_2|, forced second phase.
CaseDefinition case_annulus_quadratic_drag(const CaseOptions& opt = {});
/// Dispersed Rayleigh-Taylor column (0, 0.5) x (-2, 2) with drag 10 alpha_2 |u_2 - u_1|.
CaseDefinition case_rayleigh_taylor(const CaseOptions& opt = {});
/// Unit disk with g = 0, homogeneous Dirichlet data, non-uniform alpha and quadratic drag;
/// used to check the discrete energy inequality.
CaseDefinition case_disk_energy(const CaseOptions& opt = {});

}  // namespace mpfs
