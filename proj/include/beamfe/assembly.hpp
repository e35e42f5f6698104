#pragma once

// Global assembly over raw dofs. Element and contact blocks are evaluated
// (optionally in parallel) into per-task buffers and scattered in a fixed
// order, so results do not depend on the thread count.

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "beamfe/contact.hpp"
#include "beamfe/model.hpp"

namespace beamfe {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct ContactModel {
  bool enabled = false;
  ContactSettings settings;
  std::vector<RigidSphere> spheres;
  std::vector<RigidCylinder> cylinders;
};

struct ContactStatistics {
  int candidate_pairs = 0;
  int active_points = 0;
  int active_line_points = 0;
  int rigid_points = 0;
};

struct AssemblyOutput {
  /// R_int + R_con - R_ext on raw dofs.
  Eigen::VectorXd residual;
  SparseMatrix stiffness;
  /// Beam-to-beam contact part of the residual.
  Eigen::VectorXd contact_residual;
  double internal_energy = 0.0;
  double contact_energy = 0.0;
  ContactStatistics contact;
};

struct AssemblyOptions {
  bool stiffness = true;
  bool energy = false;
  int threads = 1;
};

AssemblyOutput assemble(const Model& model, const ModelState& state, double t, const ContactModel& contact,
                        const AssemblyOptions& options = {});

/// Consistent translational mass on raw dofs (constant).
SparseMatrix assemble_mass(const Model& model);

/// Contact elements of the current configuration (one per beam element).
std::vector<ContactElement> contact_elements(const Model& model, const ModelState& state);

/// Runs f(i) for i in [0, n) on up to `threads` threads; rethrows the first exception.
void parallel_for(int n, int threads, const std::function<void(int)>& f);

}  // namespace beamfe
