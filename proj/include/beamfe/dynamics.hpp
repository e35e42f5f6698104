#pragma once

#include <vector>

#include <Eigen/Core>

#include "beamfe/sr_element.hpp"

namespace beamfe {

struct GenAlphaParams {
  double rho_inf = 1.0;
  double alpha_m = 0.5;
  double alpha_f = 0.5;
  double beta = 0.25;
  double gamma = 0.5;
  double dt = 1.0;

  InertiaCoefficients coefficients() const { return {dt, beta, gamma, alpha_m, alpha_f}; }
};

/// alpha_m = (2 rho - 1) / (rho + 1), alpha_f = rho / (rho + 1),
/// gamma = 1/2 - alpha_m + alpha_f, beta = (1 - alpha_m + alpha_f)^2 / 4.
GenAlphaParams params_from_rho(double rho_inf, double dt);

struct DynamicState {
  Eigen::VectorXd v;     // translational velocities (raw dofs)
  Eigen::VectorXd a;     // translational accelerations
  Eigen::VectorXd amod;  // algorithmic accelerations (Simo-Reissner scheme)
  Eigen::VectorXd r_prev;  // residual at the start of the step (torsion-free scheme)
  /// Rotational Gauss point histories per element (Simo-Reissner).
  std::vector<std::vector<RotationalGaussPointState>> rotational;
  bool initialized = false;
};

struct Energies {
  double kinetic = 0.0;
  double internal = 0.0;
  double contact = 0.0;
  double total = 0.0;
};

struct DynamicsConfig {
  bool enabled = false;
  double rho_inf = 1.0;
  double dt = 1e-3;

  bool operator==(const DynamicsConfig&) const = default;
};

}  // namespace beamfe
