#pragma once

// C1-continuous Simo-Reissner beam element: Hermite centerline, three nodal
// triads interpolated objectively relative to the triad of boundary node 2,
// Petrov-Galerkin spin test functions with quadratic Lagrange polynomials.
//
// Local dof ordering (21): d1, t1, theta1 | d2, t2, theta2 | theta3, where
// node 3 is the element mid node. Rotational dofs are multiplicative spatial
// spin increments: Lambda <- exp(S(dtheta)) Lambda.

#include <array>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "beamfe/hermite.hpp"
#include "beamfe/quadrature.hpp"
#include "beamfe/rotation.hpp"
#include "beamfe/section.hpp"

namespace beamfe {

using Vector21 = Eigen::Matrix<double, 21, 1>;
using Matrix21 = Eigen::Matrix<double, 21, 21>;

/// Local index of centerline dof c (0..11, ordering d1 t1 d2 t2) in the 21-vector.
constexpr int sr_centerline_index(int c) { return c < 6 ? c : c + 3; }
/// Local index of the first spin component of triad node i (0: node 1, 1: node 2, 2: mid node).
constexpr int sr_rotation_index(int i) { return i == 0 ? 6 : (i == 1 ? 15 : 18); }

struct SRElementDofs {
  ElementCenterlineDofs centerline;
  // Nodal triads of node 1, node 2 and the mid node.
  std::array<Eigen::Matrix3d, 3> triads{Eigen::Matrix3d::Identity(), Eigen::Matrix3d::Identity(),
                                        Eigen::Matrix3d::Identity()};

  static SRElementDofs from_rotation_vectors(const ElementCenterlineDofs& c, const Eigen::Vector3d& psi1,
                                             const Eigen::Vector3d& psi2, const Eigen::Vector3d& psi3) {
    return {c, {exp_rodrigues(psi1), exp_rodrigues(psi2), exp_rodrigues(psi3)}};
  }
  std::array<Eigen::Vector3d, 3> rotation_vectors() const {
    return {log_rotation(triads[0]), log_rotation(triads[1]), log_rotation(triads[2])};
  }
};

/// Material strain measures: Omega (torsion, bending), Gamma (axial, shear).
struct SRStrainState {
  Eigen::Vector3d Omega = Eigen::Vector3d::Zero();
  Eigen::Vector3d Gamma = Eigen::Vector3d::Zero();
};

/// Quadratic Lagrange polynomials on nodes xi = -1 (node 1), +1 (node 2), 0 (mid node).
std::array<double, 3> lagrange3(double xi);
std::array<double, 3> lagrange3_derivative(double xi);

/// Interpolated triad at one point together with the data needed for strains
/// and the linearization.
struct TriadInterpolation {
  Eigen::Matrix3d lambda;
  Eigen::Matrix3d reference;  // triad of node 2
  Eigen::Vector3d phi;        // local rotation vector, Lambda = reference exp(S(phi))
  Eigen::Vector3d phi_xi;     // d phi / d xi
};

/// Precomputed relative nodal rotations of one element state.
struct NodalRelativeRotations {
  Eigen::Matrix3d reference;
  std::array<Eigen::Vector3d, 3> phi;
  std::array<bool, 3> at_pi{false, false, false};
  explicit NodalRelativeRotations(const SRElementDofs& dofs);
};

TriadInterpolation interpolate_triads(const SRElementDofs& dofs, double xi);
TriadInterpolation interpolate_triads(const NodalRelativeRotations& nodal, double xi);

/// Stress resultants f = Lambda C_F Gamma and m = Lambda C_M Omega (spatial).
std::pair<Eigen::Vector3d, Eigen::Vector3d> stress_resultants(const SRStrainState& strains,
                                                              const CrossSection& section,
                                                              const Material& material,
                                                              const Eigen::Matrix3d& lambda);

enum class ForceIntegration {
  /// 3-point Gauss-Lobatto for all terms containing the force resultant.
  ReducedLobatto,
  /// 4-point Gauss-Legendre everywhere.
  FullGauss,
};

/// Generalized-alpha constants used by the inertia linearization.
struct InertiaCoefficients {
  double dt = 1.0;
  double beta = 0.25;
  double gamma = 0.5;
  double alpha_m = 0.5;
  double alpha_f = 0.5;

  /// d(acceleration)/d(increment) = (1 - alpha_m) / ((1 - alpha_f) beta dt^2).
  double k1() const { return (1.0 - alpha_m) / ((1.0 - alpha_f) * beta * dt * dt); }
  /// d(velocity)/d(increment) = gamma / (beta dt).
  double k2() const { return gamma / (beta * dt); }
};

/// Rotational kinematic history at one Gauss point (material description).
struct RotationalGaussPointState {
  Eigen::Matrix3d lambda = Eigen::Matrix3d::Identity();
  Eigen::Vector3d W = Eigen::Vector3d::Zero();     // angular velocity
  Eigen::Vector3d A = Eigen::Vector3d::Zero();     // angular acceleration
  Eigen::Vector3d Amod = Eigen::Vector3d::Zero();  // algorithmic acceleration
};

/// Rotational state at the end of the step derived from the history and the
/// current triad at a Gauss point.
struct RotationalUpdate {
  Eigen::Vector3d increment;  // material incremental rotation vector
  Eigen::Vector3d W;
  Eigen::Vector3d A;
  Eigen::Vector3d Amod;
};
RotationalUpdate rotational_update(const RotationalGaussPointState& old, const Eigen::Matrix3d& lambda_new,
                                   const InertiaCoefficients& c);

class SimoReissnerElement {
 public:
  SimoReissnerElement(const ElementReferenceGeometry& ref, const std::array<Eigen::Matrix3d, 3>& initial_triads,
                      const CrossSection& section, const Material& material,
                      ForceIntegration integration = ForceIntegration::ReducedLobatto);

  const ElementReferenceGeometry& reference() const { return ref_; }
  const std::array<Eigen::Matrix3d, 3>& initial_triads() const { return initial_triads_; }
  const CrossSection& section() const { return section_; }
  const Material& material() const { return material_; }
  ForceIntegration integration() const { return integration_; }
  const QuadratureRule& moment_rule() const { return moment_rule_; }
  const QuadratureRule& force_rule() const { return force_rule_; }

  /// Strains at xi, offset by the initial strains so the reference state is stress free.
  SRStrainState strains(const SRElementDofs& dofs, double xi) const;

  Vector21 internal_residual(const SRElementDofs& dofs) const;
  Matrix21 tangent_stiffness(const SRElementDofs& dofs) const;
  /// Residual and consistent stiffness in one pass (either pointer may be null).
  void evaluate_internal(const SRElementDofs& dofs, Vector21* residual, Matrix21* stiffness) const;

  /// Stored energy with the same mixed quadrature as the residual.
  double strain_energy(const SRElementDofs& dofs) const;

  /// Translational mass matrix rho A int H^T H J dxi on the 12 centerline dofs.
  Eigen::Matrix<double, 12, 12> translational_mass() const;

  /// Initial rotational Gauss point history (at the moment-rule points).
  std::vector<RotationalGaussPointState> initial_rotational_history(const SRElementDofs& dofs,
                                                                    const Eigen::Vector3d& material_omega =
                                                                        Eigen::Vector3d::Zero()) const;

  /// Rotational inertia residual -int L^T m_rho J dxi and its linearization.
  void evaluate_rotational_inertia(const SRElementDofs& dofs,
                                   const std::vector<RotationalGaussPointState>& history,
                                   const InertiaCoefficients& coeffs, Vector21* residual,
                                   Matrix21* stiffness) const;

  /// Updated history after a converged step.
  std::vector<RotationalGaussPointState> updated_rotational_history(
      const SRElementDofs& dofs, const std::vector<RotationalGaussPointState>& history,
      const InertiaCoefficients& coeffs) const;

  /// Inertia operator for start-up accelerations: `gyroscopic` is the inertia
  /// residual of the history velocities at zero angular acceleration and
  /// `mass` maps nodal spatial angular accelerations to the inertia residual.
  void rotational_inertia_operator(const SRElementDofs& dofs, const std::vector<RotationalGaussPointState>& history,
                                   Vector21* gyroscopic, Matrix21* mass) const;

  /// Material angular accelerations at the moment-rule points induced by
  /// nodal spatial angular accelerations (node 1, node 2, mid node).
  std::vector<Eigen::Vector3d> gauss_point_angular_acceleration(const SRElementDofs& dofs,
                                                                const std::array<Eigen::Vector3d, 3>& nodal) const;

  /// Rotational kinetic energy 1/2 int W^T c_rho W ds of a history.
  double rotational_kinetic_energy(const std::vector<RotationalGaussPointState>& history) const;

 private:
  SRStrainState raw_strains(const SRElementDofs& dofs, double xi) const;

  ElementReferenceGeometry ref_;
  std::array<Eigen::Matrix3d, 3> initial_triads_;
  CrossSection section_;
  Material material_;
  ForceIntegration integration_;
  QuadratureRule moment_rule_;
  QuadratureRule force_rule_;
  std::vector<double> moment_jacobian_;
  std::vector<double> force_jacobian_;
  std::vector<Eigen::Vector3d> omega0_;
  std::vector<Eigen::Vector3d> gamma0_;
};

}  // namespace beamfe
