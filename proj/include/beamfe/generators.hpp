#pragma once

// Mesh and boundary-condition generators for the benchmark scenarios.

#include <string>
#include <utility>
#include <vector>

#include "beamfe/scenario.hpp"
#include "beamfe/simulation.hpp"

namespace beamfe {

struct Scenario {
  Model model;
  ContactModel contact;
  SolverConfig solver;
  DynamicsConfig dynamics;
  double t_end = 1.0;
  /// Supports whose reactions are reported, and the reference point of the reaction moment.
  std::vector<int> reaction_nodes;
  Eigen::Vector3d moment_point = Eigen::Vector3d::Zero();
  /// Physical parameters echoed into the run metadata.
  std::vector<std::pair<std::string, double>> parameters;
  /// Static scenarios whose loads act from the start: solve for equilibrium at
  /// t = 0 before the first record.
  bool initial_equilibrium = false;
};

Scenario build_scenario(const ScenarioConfig& config);

/// Fiber through an arc-length parametrized curve r(s), s in [0, length], with
/// unit tangent t(s). Triads have g1 = t and g2 perpendicular to `up`.
FiberGeometry curve_fiber(const std::function<Eigen::Vector3d(double)>& r,
                          const std::function<Eigen::Vector3d(double)>& t, double length, int n_elements,
                          const Eigen::Vector3d& up = Eigen::Vector3d::UnitZ());

/// Straight fiber from `start` along `direction` with n equal elements.
FiberGeometry straight_fiber_geometry(const Eigen::Vector3d& start, const Eigen::Vector3d& direction, double length,
                                      int n_elements);

/// Helix with linearly increasing slope, r(beta) = R0 (sin b, cos b - 1, c b^2) with
/// c = 6 / beta_max^2, beta_max = 2 pi total_coils, and R0 chosen so that the
/// full helix has arc length total_length.
struct HelixCurve {
  double R0 = 1.0;
  double c = 0.0;

  HelixCurve(double total_length, double total_coils);
  Eigen::Vector3d position(double beta) const;
  Eigen::Vector3d derivative(double beta) const;
  /// Closed-form arc length from 0 to beta.
  double arc_length(double beta) const;
  /// Inverse of arc_length by Newton iteration.
  double beta_at(double s) const;
};

}  // namespace beamfe
